#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cocache/cache_model.hpp"
#include "cocache/channel_zf.hpp"
#include "cocache/queue_cost.hpp"

namespace cocache {

// Flat key/value report; printed as "name.key=value" lines.
struct OracleReport {
  std::string name;
  std::vector<std::pair<std::string, double>> values;

  void add(std::string key, double v) { values.emplace_back(std::move(key), v); }
  double get(const std::string& key) const;
  std::string to_text() const;
};

struct GainCheck {
  double zero_mass = 0.0;
  double tail_mean = 0.0;
  double ks_stat = 0.0;      // positive gains against Exp(1)
  double ks_critical = 0.0;  // 1% critical value for the positive-sample count
  long n_positive = 0;
};

/// Draws the cache state, channel and user selection end to end and records
/// the effective gain of user 0.
GainCheck mc_effective_gain_check(double q_min, long n_samples, Rng& rng, int m = 2);

struct WaterFillingCheck {
  double level = 0.0;
  double mc_power = 0.0;
  double closed_power = 0.0;
  double mc_rate = 0.0;      // bits/s
  double closed_rate = 0.0;  // bits/s
};

/// Mean power and rate of p = (w - 1/g)^+ at the Q° water level, by simulating
/// the physical layer, against the closed forms.
WaterFillingCheck mc_water_filling_check(const SystemConfig& cfg, double q_min, long n_samples,
                                         Rng& rng, int k = 0);

struct MdpDiscretisation {
  int q_points = 200;
  int g_points = 32;
  int p_points = 32;
  double q_max = 0.0;  // <= 0 means 4 W_H
  long max_iter = 200000;
  double span_tol = 1e-6;  // relative to theta
  bool zero_power_only = false;
};

struct MdpResult {
  double theta = 0.0;
  long iterations = 0;
  double span = 0.0;
};

/// Relative value iteration on the single-user chain with the cache-dependent
/// gain mixture, per-slot cost c_k(Q) + p and fluid queue dynamics.
MdpResult tiny_mdp_average_cost(const MdpDiscretisation& disc, double q_min,
                                const SystemConfig& cfg, int k = 0);

struct SurrogateGap {
  double ratio = 0.0;  // mu0 / B_W
  double theta_tilde = 0.0;
  double c_hat = 0.0;
  double rel_gap = 0.0;
};

/// |sum_k theta_tilde_k - C_hat| / sum_k theta_tilde_k with mu0 = ratio * B_W.
std::vector<SurrogateGap> surrogate_error_scan(const std::vector<double>& ratios, double q_min,
                                               const SystemConfig& cfg);

struct ServiceRateCheck {
  double r_bar_a = 0.0;     // E[r tau | S = 1], bits per slot
  double r_bar_b = 0.0;     // E[r tau | k selected], bits per slot
  double predicted = 0.0;   // 2 mu0 tau / (1 + q_min)
  double gap = 0.0;         // |a - b| / b
  double q_min = 0.0;
};

/// Closed-loop run of the proposed controller with a fixed request profile.
ServiceRateCheck service_rate_identity_check(const SystemConfig& cfg, const CacheVector& q,
                                             const Urp& pi, long n_slots, Rng& rng);

}  // namespace cocache
