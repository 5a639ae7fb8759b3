#pragma once

#include <vector>

#include "cocache/cache_model.hpp"
#include "cocache/queue_cost.hpp"

namespace cocache {

// Constants of the closed-form outer-problem surrogate.
struct SurrogateConstants {
  double a1 = 0.0;
  double a2 = 0.0;
  double xi = 0.5;
  double c = 0.0;  // mu0 ln2 / B_W
};

SurrogateConstants surrogate_constants(const SystemConfig& cfg, double q_min);

/// Per-user surrogate cost at service probability xi, without the stage-cost
/// term: xi e^{-a1 + c/xi} - (a2 + e) xi + e.
double surrogate_user_term(const SurrogateConstants& sc);

/// C_hat(q, pi) = sum_k [xi e^{-a1+c/xi} - (a2+e) xi + e + c_k(Q°_k)].
double c_hat(const CacheVector& q, const Urp& pi, const SystemConfig& cfg);
double c_hat_at_qmin(double q_min, const SystemConfig& cfg);

/// One-sample objective C_hat(q, pi) + eta sum_l F_l q_l.
double objective_sample(const CacheVector& q, const Urp& pi, const SystemConfig& cfg);

/// Subgradient of the one-sample objective in q.
std::vector<double> noisy_subgradient(const CacheVector& q, const Urp& pi,
                                      const SystemConfig& cfg);

struct TracePoint {
  long iter = 0;
  double u_sample = 0.0;
  double u_window_avg = 0.0;
  double occupancy_bits = 0.0;
  std::vector<double> q;
};

struct OptimizerSettings {
  double sigma0 = 0.0;       // <= 0 picks the default scale (see default_sigma0)
  double q_init = 0.5;
  int window = 100;          // URP draws in the running U average
};

struct OptimizerState {
  CacheVector q;
  long iteration = 1;
  double sigma0 = 0.0;
  std::vector<TracePoint> trace;
  std::vector<double> window_samples;  // ring of the last `window` U samples
  int window = 100;
};

/// Step scale such that the first step moves each coordinate by at most 0.05.
double default_sigma0(const CacheVector& q_init, const SystemConfig& cfg);

OptimizerState make_optimizer(const SystemConfig& cfg, const OptimizerSettings& settings = {});

/// q <- min((q - sigma0/i * grad)^+, 1); appends a trace point.
void subgradient_step(OptimizerState& state, const Urp& pi, const SystemConfig& cfg);

/// n_urp steps, one per sampled request profile.
OptimizerState run_cache_optimization(const SystemConfig& cfg, long n_urp, Rng& rng,
                                      const OptimizerSettings& settings = {});

}  // namespace cocache
