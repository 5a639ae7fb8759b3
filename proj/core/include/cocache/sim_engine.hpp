#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cocache/baselines.hpp"
#include "cocache/cache_control.hpp"
#include "cocache/cache_model.hpp"
#include "cocache/queue_cost.hpp"

namespace cocache {

enum class Policy { proposed, baseline1, baseline2, baseline3, zero_power };

const char* policy_name(Policy p);
/// Accepts "proposed", "baseline1".."baseline3" and "zero_power".
Policy parse_policy(const std::string& name);

struct EpisodeSettings {
  Policy policy = Policy::proposed;
  long n_slots = 100000;
  double burn_in_fraction = 0.1;
  BaselineConfig baseline;
  CacheVector q;                   // relay cache; size must equal n_files
  std::optional<Urp> fixed_urp;    // keep one request profile for the whole run
  bool record_trace = false;
};

// Averages over the measurement window (slots after burn-in).
struct MetricsRecord {
  long n_slots = 0;  // measured slots
  std::vector<double> interruption;         // fraction of slots with Q_k < W_L
  std::vector<double> overflow;             // fraction of slots with Q_k > W_H
  std::vector<double> smooth_interruption;  // mean e^{-alpha (Q_k - W_L)^+}
  std::vector<double> smooth_overflow;      // mean e^{-alpha (W_H - Q_k)^+}
  std::vector<double> avg_power;            // per user
  std::vector<double> median_queue;

  double total_power = 0.0;        // time average of sum_k p_k
  double combined_cost = 0.0;      // sum_k (beta_k I_k + gamma_k B_k) + total_power
  double pr_comp = 0.0;            // empirical Pr[S = 1]
  double mean_q_min = 0.0;         // time average of q_min
  double occupancy_bits = 0.0;

  // Cache-underflow statistics over the whole measurement window.
  std::uint64_t comp_transmissions = 0;
  std::uint64_t underflow_events = 0;
  std::uint64_t segments_completed = 0;
  std::uint64_t segments_with_underflow = 0;
  double underflow_frequency = 0.0;  // events per CoMP transmission

  // Conditional mean served bits per slot: given S = 1 and given selection.
  std::vector<double> served_given_comp;
  std::vector<double> served_given_selected;

  // Safety minima seen during the whole run (including burn-in).
  double min_queue = 0.0;
  double min_power = 0.0;
  long degenerate_slots = 0;
  long sign_crossings = 0;

  double mean_interruption() const;
  double mean_overflow() const;
  double avg_power_per_user() const;
};

struct TraceRow {
  long slot = 0;
  int s = 0;
  double q_min = 0.0;
  std::vector<double> queue;
  std::vector<double> gain;
  std::vector<double> power;
  std::vector<double> rate;
};

struct EpisodeResult {
  MetricsRecord metrics;
  std::vector<TraceRow> trace;
};

/// One closed-loop run. Queues start at W_L and the request profile is redrawn
/// every cfg.urp_hold_slots slots.
EpisodeResult run_episode(const SystemConfig& cfg, const EpisodeSettings& settings, Rng& rng);

struct SweepPoint {
  double beta = 15.0;        // beta_k = gamma_k for every user
  double knob = 0.0;         // eta for the proposed policy, kappa for baselines
};

struct SweepGrid {
  Policy policy = Policy::proposed;
  std::vector<SweepPoint> points;
  std::vector<std::uint64_t> seeds;
  long n_slots = 1000000;
  double burn_in_fraction = 0.1;
  long cache_opt_iters = 2000;  // Algorithm-E iterations per proposed point
  double relay_gain_db = 20.0;
  int threads = 0;              // 0 = hardware concurrency
};

void validate_grid(const SweepGrid& grid);

struct SweepRow {
  Policy policy = Policy::proposed;
  std::size_t point = 0;
  double beta = 0.0;
  double gamma = 0.0;
  double knob = 0.0;
  std::uint64_t seed = 0;
  long n_slots = 0;
  MetricsRecord metrics;
  std::vector<double> q;
  std::string error;  // non-empty when the point failed
};

struct SweepAggregate {
  std::size_t point = 0;
  double beta = 0.0;
  double knob = 0.0;
  int n_ok = 0;
  double power_mean = 0.0, power_se = 0.0;
  double interruption_mean = 0.0, interruption_se = 0.0;
  double overflow_mean = 0.0, overflow_se = 0.0;
  double cost_mean = 0.0, cost_se = 0.0;
  double pr_comp_mean = 0.0;
  double occupancy_mean = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;              // grid index major, seed minor
  std::vector<SweepAggregate> aggregates;  // one per grid point
};

/// Cache vector used by the proposed policy at price eta: Algorithm E run for
/// `iters` request profiles from a seed derived from `seed`.
CacheVector optimised_cache(const SystemConfig& cfg, long iters, std::uint64_t seed);

SweepResult sweep(const SweepGrid& grid, const SystemConfig& cfg);

}  // namespace cocache
