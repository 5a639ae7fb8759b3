#include "cocache/cache_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cocache/error.hpp"

namespace cocache {
namespace {

void check_unit(double v, std::size_t l) {
  if (!(v >= 0.0 && v <= 1.0)) {
    std::ostringstream os;
    os << "cache control variable q[" << l << "] = " << v << " outside [0, 1]";
    throw DomainError(os.str());
  }
}

void check_urp(const CacheVector& q, const Urp& pi) {
  if (pi.pi.empty()) throw DomainError("user request profile is empty");
  for (int f : pi.pi) {
    if (f < 0 || static_cast<std::size_t>(f) >= q.size()) {
      std::ostringstream os;
      os << "requested file index " << f << " outside [0, " << q.size() << ")";
      throw DomainError(os.str());
    }
  }
}

}  // namespace

CacheVector::CacheVector(std::vector<double> q) : q_(std::move(q)) {
  for (std::size_t l = 0; l < q_.size(); ++l) check_unit(q_[l], l);
}

CacheVector CacheVector::uniform(std::size_t n_files, double value) {
  return CacheVector(std::vector<double>(n_files, value));
}

void CacheVector::set(std::size_t l, double value) {
  check_unit(value, l);
  q_.at(l) = value;
}

double q_min(const CacheVector& q, const Urp& pi) {
  return q[pi.pi[argmin_user(q, pi)]];
}

int argmin_user(const CacheVector& q, const Urp& pi) {
  check_urp(q, pi);
  int best = 0;
  for (std::size_t k = 1; k < pi.pi.size(); ++k) {
    if (q[pi.pi[k]] < q[pi.pi[best]]) best = static_cast<int>(k);
  }
  return best;
}

int sample_cache_state(Rng& rng, const CacheVector& q, const Urp& pi) {
  const double p = q_min(q, pi);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  // Always consume one draw so the stream stays aligned for degenerate q_min.
  return u(rng) < p ? 1 : 0;
}

double comp_probability(const CacheVector& q, const Urp& pi, CompScheme scheme) {
  check_urp(q, pi);
  if (scheme == CompScheme::mds_random) return q_min(q, pi);
  double prod = 1.0;
  for (int f : pi.pi) prod *= q[f];
  return prod;
}

SegmentLedger SegmentLedger::for_file(double segment_bits, double q_file) {
  SegmentLedger ledger;
  ledger.segment_bits = segment_bits;
  ledger.restart(q_file);
  return ledger;
}

void SegmentLedger::restart(double q_file) {
  cached_budget = 2.0 * q_file * segment_bits / (1.0 + q_file);
  cached_sent = 0.0;
  total_sent = 0.0;
  direct_sent = 0.0;
  underflow_bits = 0.0;
  underflow_in_segment = false;
}

void account_slot(SegmentLedger& ledger, double bits_sent, int s) {
  if (!(bits_sent >= 0.0)) throw DomainError("account_slot: bits_sent must be >= 0");
  if (s == 1 && bits_sent > 0.0) {
    ++ledger.comp_transmissions;
    const double room = ledger.cached_budget - ledger.cached_sent;
    if (bits_sent > room) {
      ++ledger.underflow_events;
      ledger.underflow_in_segment = true;
      ledger.underflow_bits += bits_sent - room;
      ledger.cached_sent = ledger.cached_budget;
    } else {
      ledger.cached_sent += bits_sent;
    }
  } else {
    ledger.direct_sent += bits_sent;
  }
  ledger.total_sent += bits_sent;
  if (ledger.segment_bits > 0.0 && ledger.total_sent >= ledger.segment_bits) {
    ++ledger.segments_completed;
    if (ledger.underflow_in_segment) ++ledger.segments_with_underflow;
    ledger.cached_sent = 0.0;
    ledger.total_sent = 0.0;
    ledger.direct_sent = 0.0;
    ledger.underflow_bits = 0.0;
    ledger.underflow_in_segment = false;
  }
}

double occupancy_bits(const CacheVector& q, std::span<const double> file_sizes) {
  if (file_sizes.size() != q.size()) throw DomainError("occupancy_bits: size mismatch");
  double total = 0.0;
  for (std::size_t l = 0; l < q.size(); ++l) {
    if (!(file_sizes[l] > 0.0)) throw DomainError("occupancy_bits: file sizes must be positive");
    total += file_sizes[l] * 2.0 * q[l] / (1.0 + q[l]);
  }
  return total;
}

double cache_cost_bits(const CacheVector& q, std::span<const double> file_sizes) {
  if (file_sizes.size() != q.size()) throw DomainError("cache_cost_bits: size mismatch");
  double total = 0.0;
  for (std::size_t l = 0; l < q.size(); ++l) total += file_sizes[l] * q[l];
  return total;
}

double update_load_bps(double bits, double period_s) {
  if (!(period_s > 0.0)) throw DomainError("update_load_bps: period must be positive");
  return bits / period_s;
}

Urp sample_urp(Rng& rng, const std::vector<double>& rho, int n_users) {
  if (rho.empty()) throw ConfigError("popularity vector is empty");
  double total = 0.0;
  for (double r : rho) {
    if (!(r >= 0.0)) throw ConfigError("popularity entries must be non-negative");
    total += r;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "popularity must sum to 1 (got " << total << ")";
    throw ConfigError(os.str());
  }
  std::discrete_distribution<int> pick(rho.begin(), rho.end());
  Urp u;
  u.pi.resize(n_users);
  for (int k = 0; k < n_users; ++k) u.pi[k] = pick(rng);
  return u;
}

}  // namespace cocache
