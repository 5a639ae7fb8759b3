#include <doctest.h>

#include "cocache/error.hpp"
#include "cocache/sim_engine.hpp"

using namespace cocache;

namespace {

void check_record(const MetricsRecord& m) {
  for (const auto* v : {&m.interruption, &m.overflow, &m.smooth_interruption, &m.smooth_overflow}) {
    REQUIRE(v->size() == 4);
    for (double x : *v) {
      CHECK(x >= 0.0);
      CHECK(x <= 1.0);
    }
  }
  for (double p : m.avg_power) CHECK(p >= 0.0);
  CHECK(m.min_queue >= 0.0);
  CHECK(m.min_power >= 0.0);
  CHECK(m.pr_comp >= 0.0);
  CHECK(m.pr_comp <= 1.0);
  CHECK(m.underflow_frequency >= 0.0);
  CHECK(m.underflow_frequency <= 1.0);
  CHECK(m.degenerate_slots == 0);
}

EpisodeResult run(Policy p, const CacheVector& q, long n, std::uint64_t seed, double kappa = 1.0) {
  const SystemConfig c;
  EpisodeSettings es;
  es.policy = p;
  es.n_slots = n;
  es.q = q;
  es.baseline.kappa = kappa;
  es.baseline.id = p == Policy::baseline2 ? 2 : p == Policy::baseline3 ? 3 : 1;
  Rng rng(seed);
  return run_episode(c, es, rng);
}

}  // namespace

TEST_CASE("policy names round trip") {
  for (Policy p : {Policy::proposed, Policy::baseline1, Policy::baseline2, Policy::baseline3,
                   Policy::zero_power}) {
    CHECK(parse_policy(policy_name(p)) == p);
  }
  CHECK_THROWS_AS(parse_policy("greedy"), ConfigError);
}

TEST_CASE("zero-power stub starves every buffer") {
  const auto r = run(Policy::zero_power, CacheVector::uniform(6, 0.5), 20000, 1);
  check_record(r.metrics);
  CHECK(r.metrics.mean_interruption() == doctest::Approx(1.0));
  CHECK(r.metrics.avg_power_per_user() == 0.0);
}

TEST_CASE("proposed policy: CoMP frequency and buffer location") {
  const auto r = run(Policy::proposed, CacheVector::uniform(6, 0.5), 100000, 2);
  const MetricsRecord& m = r.metrics;
  check_record(m);
  CHECK(std::abs(m.pr_comp - 0.5) <= 0.01);
  CHECK(m.mean_q_min == doctest::Approx(0.5));
  for (double med : m.median_queue) {
    CHECK(med > 2e4);
    CHECK(med < 2.5e5);
  }
  CHECK(m.occupancy_bits == doctest::Approx(6 * 4.8e9 * 2 * 0.5 / 1.5));
}

TEST_CASE("no relay cache means more interruptions") {
  const SystemConfig c;
  const CacheVector opt = optimised_cache(c, 2000, 1);
  const auto with = run(Policy::proposed, opt, 200000, 3);
  const auto without = run(Policy::proposed, CacheVector::uniform(6, 0.0), 200000, 3);
  CHECK(without.metrics.pr_comp == 0.0);
  CHECK(without.metrics.mean_interruption() > with.metrics.mean_interruption());
}

TEST_CASE("episodes are reproducible") {
  const auto a = run(Policy::proposed, CacheVector::uniform(6, 0.4), 30000, 9);
  const auto b = run(Policy::proposed, CacheVector::uniform(6, 0.4), 30000, 9);
  CHECK(a.metrics.interruption == b.metrics.interruption);
  CHECK(a.metrics.avg_power == b.metrics.avg_power);
  CHECK(a.metrics.total_power == b.metrics.total_power);
}

TEST_CASE("baselines run and keep the invariants") {
  check_record(run(Policy::baseline1, CacheVector::uniform(6, 0.0), 20000, 4, 1e5).metrics);
  check_record(run(Policy::baseline2, CacheVector::uniform(6, 0.0), 20000, 4, 2e10).metrics);
  const auto b3 = run(Policy::baseline3, CacheVector::uniform(6, 0.0), 20000, 4, 2e10).metrics;
  check_record(b3);
  CHECK(b3.pr_comp == 0.0);
}

TEST_CASE("trace rows") {
  const SystemConfig c;
  EpisodeSettings es;
  es.n_slots = 500;
  es.q = CacheVector::uniform(6, 0.5);
  es.record_trace = true;
  Rng rng(5);
  const auto r = run_episode(c, es, rng);
  REQUIRE(r.trace.size() == 500);
  for (const TraceRow& t : r.trace) {
    CHECK(t.queue.size() == 4);
    for (double x : t.queue) CHECK(x >= 0.0);
    for (double p : t.power) CHECK(p >= 0.0);
  }
}

TEST_CASE("grid validation") {
  SweepGrid g;
  CHECK_THROWS_AS(validate_grid(g), ConfigError);
  g.points = {{15.0, 1e5}};
  CHECK_THROWS_AS(validate_grid(g), ConfigError);
  g.seeds = {1, 1};
  CHECK_THROWS_AS(validate_grid(g), ConfigError);
  g.seeds = {1, 2};
  CHECK_NOTHROW(validate_grid(g));
}

TEST_CASE("single-point sweep reduces to one episode") {
  const SystemConfig c;
  SweepGrid g;
  g.policy = Policy::baseline1;
  g.points = {{15.0, 1e5}};
  g.seeds = {7};
  g.n_slots = 20000;
  g.threads = 1;
  const SweepResult s = sweep(g, c);
  REQUIRE(s.rows.size() == 1);
  REQUIRE(s.aggregates.size() == 1);
  const auto direct = run(Policy::baseline1, CacheVector::uniform(6, 0.0), 20000, 7, 1e5);
  CHECK(s.rows[0].metrics.interruption == direct.metrics.interruption);
  CHECK(s.aggregates[0].power_mean == direct.metrics.avg_power_per_user());
  CHECK(s.aggregates[0].power_se == 0.0);
}

TEST_CASE("failed points are recorded and the sweep continues") {
  const SystemConfig c;
  SweepGrid g;
  g.policy = Policy::baseline1;
  g.points = {{15.0, 1e5}, {15.0, -1.0}};
  g.seeds = {1};
  g.n_slots = 2000;
  const SweepResult s = sweep(g, c);
  REQUIRE(s.rows.size() == 2);
  CHECK(s.rows[0].error.empty());
  CHECK(!s.rows[1].error.empty());
  CHECK(s.aggregates[1].n_ok == 0);
}
