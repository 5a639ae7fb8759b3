#include "cocache/baselines.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <cstdint>

#include "cocache/error.hpp"
#include "cocache/special_math.hpp"

namespace cocache {

void validate_baseline(const BaselineConfig& bl) {
  if (!(bl.kappa > 0.0)) throw ConfigError("baseline kappa must be positive");
  if (bl.id < 1 || bl.id > 3) throw ConfigError("baseline id must be 1, 2 or 3");
}

double baseline1_power(double g, const SystemConfig& cfg, const BaselineConfig& bl) {
  if (!(g > 0.0)) return 0.0;
  return std::max(cfg.bw / (bl.kappa * kLn2) - 1.0 / g, 0.0);
}

double baseline2_power(double g, double qk, const SystemConfig& cfg, const BaselineConfig& bl) {
  const double weight = std::max(cfg.w_high - qk, 0.0);
  if (!(g > 0.0) || weight == 0.0) return 0.0;
  return std::max(weight * cfg.bw / (bl.kappa * kLn2) - 1.0 / g, 0.0);
}

ComplexMatrix sample_relay_channel(Rng& rng, int m, double gain_db) {
  std::normal_distribution<double> n01(0.0, std::sqrt(0.5));
  ComplexMatrix h(m, m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) h(i, j) = {n01(rng), n01(rng)};
  }
  return std::pow(10.0, gain_db / 20.0) * h;
}

std::vector<double> df_phase_gains(const ChannelState& h, const ComplexMatrix& h_br,
                                   const std::vector<int>& selected) {
  const int m = h.m;
  if (static_cast<int>(selected.size()) != m || h_br.rows() != m || h_br.cols() != m) {
    throw DomainError("df_phase_gains: expects M selected users and an M x M relay channel");
  }
  // Phase 1: stream j leaves BS antenna j and is separated at the RS by ZF
  // reception; gain of stream j is 1 / [(H^H H)^{-1}]_jj.
  std::vector<double> g1;
  zero_forcing_gains(h_br.transpose(), g1);

  // Phase 2: joint ZF from all 2M antennas to the selected users.
  ComplexMatrix rows(m, h.full.cols());
  for (int j = 0; j < m; ++j) rows.row(j) = h.full.row(selected[j]);
  std::vector<double> g2;
  zero_forcing_gains(rows, g2);

  std::vector<double> out(m);
  for (int j = 0; j < m; ++j) out[j] = std::min(g1[j], g2[j]);
  return out;
}

double df_rate(double g_eff, double p, double bw) {
  return 0.5 * instantaneous_rate(g_eff, p, bw);
}

double df_power(double g_eff, double weight, const SystemConfig& cfg, const BaselineConfig& bl) {
  if (!(g_eff > 0.0) || !(weight > 0.0)) return 0.0;
  // The objective is concave in p and its maximiser lies below the
  // unclipped water level weight * B_W / (2 kappa ln2).
  const double hi = weight * cfg.bw / (2.0 * bl.kappa * kLn2);
  if (!(hi > 1.0 / g_eff)) return 0.0;
  auto neg = [&](double p) { return -(weight * df_rate(g_eff, p, cfg.bw) - bl.kappa * p); };
  std::uintmax_t iters = 200;
  // 11 bits of precision is a relative tolerance of about 1e-3 on p.
  const auto r = boost::math::tools::brent_find_minima(neg, 0.0, hi, 11, iters);
  return r.first;
}

DfSlot baseline3_df_step(const ChannelState& h, const ComplexMatrix& h_br,
                         std::span<const double> queues, const SystemConfig& cfg,
                         const BaselineConfig& bl, Rng& rng) {
  const int n = h.n_users();
  DfSlot out;
  out.selected = sample_user_subset(rng, n, h.m);
  out.rate.assign(n, 0.0);
  out.power.assign(n, 0.0);
  out.gain.assign(n, 0.0);
  const std::vector<double> g = df_phase_gains(h, h_br, out.selected);
  for (std::size_t j = 0; j < out.selected.size(); ++j) {
    const int k = out.selected[j];
    const double weight = std::max(cfg.w_high - queues[k], 0.0);
    out.gain[k] = g[j];
    out.power[k] = df_power(g[j], weight, cfg, bl);
    out.rate[k] = df_rate(g[j], out.power[k], cfg.bw);
  }
  return out;
}

}  // namespace cocache
