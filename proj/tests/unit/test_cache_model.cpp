#include <doctest.h>

#include <cmath>

#include "cocache/cache_model.hpp"
#include "cocache/error.hpp"

using namespace cocache;

TEST_CASE("CacheVector range") {
  CHECK_THROWS(CacheVector({0.2, 1.2}));
  CHECK_THROWS(CacheVector({-0.1}));
  CacheVector q = CacheVector::uniform(3, 0.4);
  CHECK(q.size() == 3);
  CHECK_THROWS(q.set(0, 2.0));
  q.set(1, 1.0);
  CHECK(q[1] == 1.0);
}

TEST_CASE("q_min and argmin_user") {
  const Urp pi{{0, 1, 0, 1}};
  CHECK(q_min(CacheVector::uniform(6, 0.5), pi) == 0.5);
  CHECK(q_min(CacheVector({0.9, 0.2, 1, 1, 1, 1}), pi) == 0.2);
  CHECK(q_min(CacheVector({0.0, 0.2, 1, 1, 1, 1}), pi) == 0.0);
  CHECK(argmin_user(CacheVector({0.9, 0.2, 1, 1, 1, 1}), pi) == 1);
  // Ties go to the lowest user index.
  CHECK(argmin_user(CacheVector::uniform(6, 0.3), Urp{{3, 2, 1, 0}}) == 0);
}

TEST_CASE("sample_cache_state") {
  Rng rng(17);
  const Urp pi{{0, 1, 2, 3}};
  for (int i = 0; i < 1000; ++i) {
    CHECK(sample_cache_state(rng, CacheVector({0, 1, 1, 1}), pi) == 0);
    CHECK(sample_cache_state(rng, CacheVector::uniform(4, 1.0), pi) == 1);
  }
  const int n = 100000;
  int ones = 0;
  for (int i = 0; i < n; ++i) ones += sample_cache_state(rng, CacheVector::uniform(4, 0.5), pi);
  CHECK(std::abs(static_cast<double>(ones) / n - 0.5) <= 0.005);
}

TEST_CASE("comp_probability examples") {
  const Urp pi{{0, 1, 2, 3, 4, 5, 6, 7}};
  const CacheVector q = CacheVector::uniform(8, 0.5);
  CHECK(comp_probability(q, pi, CompScheme::naive_independent) == 0.00390625);
  CHECK(comp_probability(q, pi, CompScheme::mds_random) == 0.5);
  CacheVector z = q;
  z.set(3, 0.0);
  CHECK(comp_probability(z, pi, CompScheme::naive_independent) == 0.0);
  CHECK(comp_probability(z, pi, CompScheme::mds_random) == 0.0);
}

TEST_CASE("account_slot ledger arithmetic") {
  SegmentLedger l;
  l.segment_bits = 1000;
  l.cached_budget = 100;
  l.cached_sent = 90;
  account_slot(l, 20, 1);
  CHECK(l.underflow_events == 1);
  CHECK(l.cached_sent == 100);
  CHECK(l.comp_transmissions == 1);

  const double before = l.cached_sent;
  account_slot(l, 50, 0);
  CHECK(l.cached_sent == before);
  CHECK(l.underflow_events == 1);
}

TEST_CASE("ledger invariants and rollover") {
  Rng rng(4);
  std::uniform_real_distribution<double> bits(0.0, 3000.0);
  std::bernoulli_distribution comp(0.5);
  SegmentLedger l = SegmentLedger::for_file(1e5, 0.5);
  CHECK(l.cached_budget == doctest::Approx(2.0 * 0.5 * 1e5 / 1.5));
  std::uint64_t prev_segments = 0;
  for (int i = 0; i < 20000; ++i) {
    account_slot(l, bits(rng), comp(rng) ? 1 : 0);
    CHECK(l.cached_sent >= 0.0);
    CHECK(l.cached_sent <= l.cached_budget + 1e-9);
    CHECK(l.total_sent < l.segment_bits);
    CHECK(l.segments_completed >= prev_segments);
    prev_segments = l.segments_completed;
  }
  CHECK(l.segments_completed > 100);
  CHECK(l.segments_with_underflow <= l.segments_completed);
  l.restart(0.0);
  CHECK(l.cached_budget == 0.0);
  CHECK(l.cached_sent == 0.0);
  CHECK(l.total_sent == 0.0);
}

TEST_CASE("occupancy and update load") {
  const std::vector<double> f(6, 4.8e9);
  CHECK(occupancy_bits(CacheVector::uniform(6, 0.0), f) == 0.0);
  CHECK(occupancy_bits(CacheVector::uniform(6, 1.0), f) == doctest::Approx(6 * 4.8e9));
  const std::vector<double> one{4.8e9};
  CHECK(occupancy_bits(CacheVector({0.6}), one) == doctest::Approx(3.6e9));
  CHECK(cache_cost_bits(CacheVector({0.6}), one) == doctest::Approx(0.6 * 4.8e9));
  CHECK(update_load_bps(0.0, kSecondsPerWeek) == 0.0);
  CHECK(update_load_bps(1.8e9 * 8, kSecondsPerWeek) == doctest::Approx(23809.5).epsilon(1e-4));
  CHECK(update_load_bps(0.9e9 * 8, kSecondsPerWeek) == doctest::Approx(11904.8).epsilon(1e-4));
}

TEST_CASE("sample_urp") {
  Rng rng(8);
  const Urp one = sample_urp(rng, {0, 0, 1, 0}, 4);
  for (int f : one.pi) CHECK(f == 2);

  Rng a(99);
  Rng b(99);
  const std::vector<double> rho{0.6, 0.3, 0.08, 0.01, 0.005, 0.005};
  CHECK(sample_urp(a, rho, 4).pi == sample_urp(b, rho, 4).pi);

  const int n = 100000;
  int first = 0;
  for (int i = 0; i < n; ++i) {
    const Urp u = sample_urp(rng, rho, 1);
    REQUIRE(u.pi.size() == 1);
    CHECK(u.pi[0] >= 0);
    CHECK(u.pi[0] < 6);
    first += u.pi[0] == 0;
  }
  CHECK(std::abs(static_cast<double>(first) / n - 0.6) <= 0.005);

  CHECK_THROWS_AS(sample_urp(rng, {0.5, 0.4}, 4), ConfigError);
  CHECK_THROWS_AS(sample_urp(rng, {1.5, -0.5}, 4), ConfigError);
  CHECK_THROWS_AS(sample_urp(rng, {}, 4), ConfigError);
}
