#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cocache/channel_zf.hpp"

namespace cocache {

// Fraction of each video file's parity stream kept at the relay, q_l in [0,1].
class CacheVector {
 public:
  CacheVector() = default;
  explicit CacheVector(std::vector<double> q);
  static CacheVector uniform(std::size_t n_files, double value);

  std::size_t size() const { return q_.size(); }
  double operator[](std::size_t l) const { return q_[l]; }
  void set(std::size_t l, double value);
  std::span<const double> values() const { return q_; }

 private:
  std::vector<double> q_;
};

// User request profile: file index (0-based) requested by each of the 2M users.
struct Urp {
  std::vector<int> pi;
};

/// i.i.d. categorical file request per user; throws ConfigError when rho is not
/// a probability vector.
Urp sample_urp(Rng& rng, const std::vector<double>& rho, int n_users);

enum class CompScheme { mds_random, naive_independent };

double q_min(const CacheVector& q, const Urp& pi);

/// Index of the first user (lowest index) whose requested file attains q_min.
int argmin_user(const CacheVector& q, const Urp& pi);

/// Bernoulli(q_min) cache state.
int sample_cache_state(Rng& rng, const CacheVector& q, const Urp& pi);

/// Probability that every user's payload is available at the relay: min over the
/// requested q (MDS-coded random cache) or their product (naive independent
/// caching of half-files).
double comp_probability(const CacheVector& q, const Urp& pi, CompScheme scheme);

/// Per-user parity-bit bookkeeping for the segment currently being streamed.
struct SegmentLedger {
  double segment_bits = 0.0;   // L_S
  double cached_budget = 0.0;  // 2 q L_S / (1 + q)
  double cached_sent = 0.0;
  double total_sent = 0.0;
  double direct_sent = 0.0;     // bits sent in BS-only slots
  double underflow_bits = 0.0;  // bits sent in CoMP slots beyond the budget

  // Lifetime counters.
  std::uint64_t underflow_events = 0;   // CoMP transmissions hitting an exhausted cache
  std::uint64_t comp_transmissions = 0; // CoMP transmissions with bits_sent > 0
  std::uint64_t segments_completed = 0;
  std::uint64_t segments_with_underflow = 0;
  bool underflow_in_segment = false;

  static SegmentLedger for_file(double segment_bits, double q_file);
  // Starts a fresh segment (e.g. after a request change) with a new budget.
  void restart(double q_file);
};

/// Accounts `bits_sent` delivered to one user in a slot with cache state `s`.
/// CoMP bits beyond the cached budget are counted as underflow but still
/// delivered. Rolls the segment over once total_sent reaches L_S.
void account_slot(SegmentLedger& ledger, double bits_sent, int s);

/// Physical relay storage, sum_l F_l * 2 q_l / (1 + q_l).
double occupancy_bits(const CacheVector& q, std::span<const double> file_sizes);

/// Cache-cost weight sum_l F_l q_l used by the optimisation objective.
double cache_cost_bits(const CacheVector& q, std::span<const double> file_sizes);

/// Average backhaul load to refill `bits` over `period_s` seconds.
double update_load_bps(double bits, double period_s);

inline constexpr double kSecondsPerWeek = 7.0 * 24.0 * 3600.0;

}  // namespace cocache
