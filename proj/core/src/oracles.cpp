#include "cocache/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "cocache/cache_control.hpp"
#include "cocache/error.hpp"
#include "cocache/power_control.hpp"
#include "cocache/sim_engine.hpp"
#include "cocache/special_math.hpp"

namespace cocache {

double OracleReport::get(const std::string& key) const {
  for (const auto& [k, v] : values) {
    if (k == key) return v;
  }
  throw DomainError("oracle report '" + name + "' has no key '" + key + "'");
}

std::string OracleReport::to_text() const {
  std::ostringstream os;
  char buf[64];
  for (const auto& [k, v] : values) {
    std::snprintf(buf, sizeof buf, "%.12g", v);
    os << name << '.' << k << '=' << buf << '\n';
  }
  return os.str();
}

GainCheck mc_effective_gain_check(double q_min, long n_samples, Rng& rng, int m) {
  if (!(q_min >= 0.0 && q_min <= 1.0)) throw DomainError("q_min must lie in [0, 1]");
  if (n_samples < 1) throw DomainError("n_samples must be >= 1");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ChannelState h;
  h.m = m;
  BeamformOutcome out;
  std::vector<double> positive;
  positive.reserve(static_cast<std::size_t>(n_samples));
  long zeros = 0;
  for (long i = 0; i < n_samples; ++i) {
    const int s = unit(rng) < q_min ? 1 : 0;
    sample_channel_into(rng, h);
    select_and_beamform_into(h, s, rng, out);
    const double g = out.gains[0];
    if (g > 0.0) {
      positive.push_back(g);
    } else {
      ++zeros;
    }
  }
  GainCheck r;
  r.zero_mass = static_cast<double>(zeros) / static_cast<double>(n_samples);
  r.n_positive = static_cast<long>(positive.size());
  if (positive.empty()) return r;
  std::sort(positive.begin(), positive.end());
  double sum = 0.0;
  double d = 0.0;
  const double n = static_cast<double>(positive.size());
  for (std::size_t i = 0; i < positive.size(); ++i) {
    sum += positive[i];
    const double cdf = -std::expm1(-positive[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - cdf, cdf - static_cast<double>(i) / n});
  }
  r.tail_mean = sum / n;
  r.ks_stat = d;
  r.ks_critical = 1.628 / std::sqrt(n);
  return r;
}

WaterFillingCheck mc_water_filling_check(const SystemConfig& cfg, double q_min, long n_samples,
                                         Rng& rng, int k) {
  const PolicyTables tables(cfg, q_min, false);
  WaterFillingCheck r;
  r.level = tables.level_at_qcirc(k);
  r.closed_power = tables.xi() * water_filling_mean_power(r.level);
  r.closed_rate = tables.xi() * cfg.bw / kLn2 * water_filling_mean_log_gain(r.level);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ChannelState h;
  h.m = cfg.m;
  BeamformOutcome out;
  double psum = 0.0;
  double rsum = 0.0;
  for (long i = 0; i < n_samples; ++i) {
    const int s = unit(rng) < q_min ? 1 : 0;
    sample_channel_into(rng, h);
    select_and_beamform_into(h, s, rng, out);
    const double g = out.gains[k];
    const double p = g > 0.0 ? std::max(r.level - 1.0 / g, 0.0) : 0.0;
    psum += p;
    rsum += instantaneous_rate(g, p, cfg.bw);
  }
  r.mc_power = psum / static_cast<double>(n_samples);
  r.mc_rate = rsum / static_cast<double>(n_samples);
  return r;
}

MdpResult tiny_mdp_average_cost(const MdpDiscretisation& disc, double q_min,
                                const SystemConfig& cfg, int k) {
  if (disc.q_points < 2 || disc.g_points < 1 || disc.p_points < 1) {
    throw DomainError("tiny_mdp: grid sizes must be positive (queue grid >= 2)");
  }
  const double xi = 0.5 * (1.0 + q_min);
  const double q_max = disc.q_max > 0.0 ? disc.q_max : 4.0 * cfg.w_high;
  const int nq = disc.q_points;
  const double dq = q_max / (nq - 1);

  // Gain mixture: an atom at 0 with mass 1 - xi, and Exp(1) at mid-quantiles.
  std::vector<double> gains;
  std::vector<double> weights;
  if (xi < 1.0) {
    gains.push_back(0.0);
    weights.push_back(1.0 - xi);
  }
  for (int i = 0; i < disc.g_points; ++i) {
    const double u = (i + 0.5) / disc.g_points;
    gains.push_back(-std::log1p(-u));
    weights.push_back(xi / disc.g_points);
  }

  // Power grid: 0 plus log-spaced levels up to ten times the largest water
  // level the closed-form controller uses on this queue range.
  std::vector<double> powers{0.0};
  if (!disc.zero_power_only) {
    const PolicyTables tables(cfg, q_min, false);
    double top = 0.0;
    for (int i = 0; i < nq; i += std::max(1, nq / 64)) {
      top = std::max(top, tables.solve_level(k, i * dq));
    }
    top = 10.0 * std::max(top, 1.0);
    const double bottom = top * 1e-4;
    for (int j = 0; j + 1 < disc.p_points; ++j) {
      const double t = disc.p_points > 2 ? static_cast<double>(j) / (disc.p_points - 2) : 1.0;
      powers.push_back(bottom * std::pow(top / bottom, t));
    }
  }

  const std::size_t ng = gains.size();
  const std::size_t np = powers.size();
  std::vector<double> served(ng * np);
  for (std::size_t a = 0; a < ng; ++a) {
    for (std::size_t b = 0; b < np; ++b) {
      served[a * np + b] = instantaneous_rate(gains[a], powers[b], cfg.bw) * cfg.tau;
    }
  }
  std::vector<double> cost(nq);
  std::vector<double> drain(nq);
  for (int i = 0; i < nq; ++i) {
    cost[i] = stage_cost(i * dq, cfg, k);
    drain[i] = playback_rate(i * dq, cfg) * cfg.tau;
  }

  std::vector<double> v(nq, 0.0);
  std::vector<double> tv(nq, 0.0);
  auto interp = [&](double x) {
    x = std::clamp(x, 0.0, q_max);
    const double pos = x / dq;
    const int j = std::min(static_cast<int>(pos), nq - 2);
    const double t = pos - j;
    return v[j] + t * (v[j + 1] - v[j]);
  };

  MdpResult res;
  for (long it = 1; it <= disc.max_iter; ++it) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int i = 0; i < nq; ++i) {
      const double q = i * dq;
      double expect = 0.0;
      for (std::size_t a = 0; a < ng; ++a) {
        // With no gain every power only adds cost.
        const std::size_t nb = gains[a] > 0.0 ? np : 1;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t b = 0; b < nb; ++b) {
          const double next = q + served[a * np + b] - drain[i];
          best = std::min(best, powers[b] + interp(next));
        }
        expect += weights[a] * best;
      }
      tv[i] = cost[i] + expect;
      const double diff = tv[i] - v[i];
      lo = std::min(lo, diff);
      hi = std::max(hi, diff);
    }
    // Normalise at the empty-buffer state.
    const double ref = tv[0];
    for (int i = 0; i < nq; ++i) v[i] = tv[i] - ref;
    res.theta = 0.5 * (lo + hi);
    res.span = hi - lo;
    res.iterations = it;
    if (res.span < disc.span_tol * std::abs(res.theta)) return res;
  }
  std::ostringstream os;
  os << "tiny_mdp: no convergence after " << disc.max_iter << " iterations (span " << res.span
     << ", theta " << res.theta << ")";
  throw ConvergenceError(os.str(), res.theta);
}

std::vector<SurrogateGap> surrogate_error_scan(const std::vector<double>& ratios, double q_min,
                                               const SystemConfig& cfg) {
  std::vector<SurrogateGap> out;
  for (double ratio : ratios) {
    SystemConfig c = cfg;
    c.mu0 = ratio * cfg.bw;
    SurrogateGap g;
    g.ratio = ratio;
    for (int k = 0; k < c.n_users(); ++k) g.theta_tilde += theta_tilde(q_min, c, k);
    g.c_hat = c_hat_at_qmin(q_min, c);
    g.rel_gap = std::abs(g.theta_tilde - g.c_hat) / g.theta_tilde;
    out.push_back(g);
  }
  return out;
}

ServiceRateCheck service_rate_identity_check(const SystemConfig& cfg, const CacheVector& q,
                                             const Urp& pi, long n_slots, Rng& rng) {
  EpisodeSettings es;
  es.policy = Policy::proposed;
  es.n_slots = n_slots;
  es.q = q;
  es.fixed_urp = pi;
  const MetricsRecord m = run_episode(cfg, es, rng).metrics;
  ServiceRateCheck r;
  r.q_min = q_min(q, pi);
  for (int k = 0; k < cfg.n_users(); ++k) {
    r.r_bar_a += m.served_given_comp[k];
    r.r_bar_b += m.served_given_selected[k];
  }
  r.r_bar_a /= cfg.n_users();
  r.r_bar_b /= cfg.n_users();
  r.predicted = 2.0 * cfg.mu0 * cfg.tau / (1.0 + r.q_min);
  r.gap = r.r_bar_b > 0.0 ? std::abs(r.r_bar_a - r.r_bar_b) / r.r_bar_b : 0.0;
  return r;
}

}  // namespace cocache
