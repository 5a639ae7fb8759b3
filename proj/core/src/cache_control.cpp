#include "cocache/cache_control.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cocache/error.hpp"
#include "cocache/special_math.hpp"

namespace cocache {
namespace {

double stage_cost_at_minimisers(const SystemConfig& cfg) {
  double s = 0.0;
  for (int k = 0; k < cfg.n_users(); ++k) s += stage_cost(q_circ(cfg, k), cfg, k);
  return s;
}

// d/dxi of the per-user surrogate term.
double surrogate_slope(const SurrogateConstants& sc) {
  const double r = sc.c / sc.xi;
  return (1.0 - r) * std::exp(-sc.a1 + r) - sc.a2 - kE;
}

}  // namespace

SurrogateConstants surrogate_constants(const SystemConfig& cfg, double q_min) {
  SurrogateConstants sc;
  sc.c = cfg.mu0 * kLn2 / cfg.bw;
  const double ec = std::exp(-sc.c);
  sc.a2 = exp_integral_e1(ec);
  sc.a1 = -sc.c * std::exp(-ec) + sc.a2;
  sc.xi = 0.5 * (1.0 + q_min);
  return sc;
}

double surrogate_user_term(const SurrogateConstants& sc) {
  return sc.xi * std::exp(-sc.a1 + sc.c / sc.xi) - (sc.a2 + kE) * sc.xi + kE;
}

double c_hat_at_qmin(double q_min, const SystemConfig& cfg) {
  const SurrogateConstants sc = surrogate_constants(cfg, q_min);
  return cfg.n_users() * surrogate_user_term(sc) + stage_cost_at_minimisers(cfg);
}

double c_hat(const CacheVector& q, const Urp& pi, const SystemConfig& cfg) {
  return c_hat_at_qmin(q_min(q, pi), cfg);
}

double objective_sample(const CacheVector& q, const Urp& pi, const SystemConfig& cfg) {
  return c_hat(q, pi, cfg) + cfg.eta * cache_cost_bits(q, cfg.file_sizes);
}

std::vector<double> noisy_subgradient(const CacheVector& q, const Urp& pi,
                                      const SystemConfig& cfg) {
  if (q.size() != cfg.file_sizes.size()) {
    throw DomainError("noisy_subgradient: cache vector and file sizes differ in length");
  }
  std::vector<double> grad(q.size());
  for (std::size_t l = 0; l < q.size(); ++l) grad[l] = cfg.eta * cfg.file_sizes[l];
  const int kstar = argmin_user(q, pi);
  const SurrogateConstants sc = surrogate_constants(cfg, q[pi.pi[kstar]]);
  grad[pi.pi[kstar]] += cfg.m * surrogate_slope(sc);
  return grad;
}

double default_sigma0(const CacheVector& q_init, const SystemConfig& cfg) {
  // Largest gradient magnitude any coordinate can see at the initial point.
  double qlo = 1.0;
  for (double v : q_init.values()) qlo = std::min(qlo, v);
  const double slope = std::abs(cfg.m * surrogate_slope(surrogate_constants(cfg, qlo)));
  const double fmax = *std::max_element(cfg.file_sizes.begin(), cfg.file_sizes.end());
  return 0.05 / (slope + cfg.eta * fmax);
}

OptimizerState make_optimizer(const SystemConfig& cfg, const OptimizerSettings& settings) {
  if (settings.window < 1) throw DomainError("optimizer window must be >= 1");
  OptimizerState st;
  st.q = CacheVector::uniform(cfg.file_sizes.size(), settings.q_init);
  st.sigma0 = settings.sigma0 > 0.0 ? settings.sigma0 : default_sigma0(st.q, cfg);
  st.window = settings.window;
  return st;
}

void subgradient_step(OptimizerState& st, const Urp& pi, const SystemConfig& cfg) {
  TracePoint tp;
  tp.iter = st.iteration;
  tp.u_sample = objective_sample(st.q, pi, cfg);
  st.window_samples.push_back(tp.u_sample);
  if (static_cast<int>(st.window_samples.size()) > st.window) {
    st.window_samples.erase(st.window_samples.begin());
  }
  tp.u_window_avg = std::accumulate(st.window_samples.begin(), st.window_samples.end(), 0.0) /
                    static_cast<double>(st.window_samples.size());

  const std::vector<double> grad = noisy_subgradient(st.q, pi, cfg);
  const double step = st.sigma0 / static_cast<double>(st.iteration);
  for (std::size_t l = 0; l < grad.size(); ++l) {
    st.q.set(l, std::clamp(st.q[l] - step * grad[l], 0.0, 1.0));
  }
  tp.occupancy_bits = occupancy_bits(st.q, cfg.file_sizes);
  tp.q.assign(st.q.values().begin(), st.q.values().end());
  st.trace.push_back(std::move(tp));
  ++st.iteration;
}

OptimizerState run_cache_optimization(const SystemConfig& cfg, long n_urp, Rng& rng,
                                      const OptimizerSettings& settings) {
  OptimizerState st = make_optimizer(cfg, settings);
  st.trace.reserve(static_cast<std::size_t>(std::max(n_urp, 0L)));
  for (long i = 0; i < n_urp; ++i) {
    const Urp pi = sample_urp(rng, cfg.popularity, cfg.n_users());
    subgradient_step(st, pi, cfg);
  }
  return st;
}

}  // namespace cocache
