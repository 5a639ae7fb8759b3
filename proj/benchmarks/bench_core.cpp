#include <benchmark/benchmark.h>

#include "cocache/channel_zf.hpp"
#include "cocache/power_control.hpp"
#include "cocache/sim_engine.hpp"
#include "cocache/special_math.hpp"

using namespace cocache;

static void BM_E1(benchmark::State& state) {
  double x = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(exp_integral_e1(x));
    x = x < 40.0 ? x * 1.1 : 0.01;
  }
}
BENCHMARK(BM_E1);

static void BM_SolveLevel(benchmark::State& state) {
  const SystemConfig c;
  const PolicyTables t(c, 0.5, false);
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(t.solve_level(0, x));
    x = x < 5e5 ? x + 997.0 : 0.0;
  }
}
BENCHMARK(BM_SolveLevel);

static void BM_MemoLevel(benchmark::State& state) {
  const SystemConfig c;
  const PolicyTables t(c, 0.5, true);
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(t.level(0, x));
    x = x < 5e5 ? x + 997.0 : 0.0;
  }
}
BENCHMARK(BM_MemoLevel);

static void BM_TablesBuild(benchmark::State& state) {
  const SystemConfig c;
  for (auto _ : state) benchmark::DoNotOptimize(PolicyTables(c, 0.5, true).theta_tilde(0));
}
BENCHMARK(BM_TablesBuild)->Unit(benchmark::kMillisecond);

static void BM_SelectAndBeamform(benchmark::State& state) {
  Rng rng(1);
  ChannelState h;
  h.m = 2;
  BeamformOutcome out;
  const int s = static_cast<int>(state.range(0));
  for (auto _ : state) {
    sample_channel_into(rng, h);
    select_and_beamform_into(h, s, rng, out);
    benchmark::DoNotOptimize(out.gains.data());
  }
}
BENCHMARK(BM_SelectAndBeamform)->Arg(0)->Arg(1);

static void BM_EpisodeSlots(benchmark::State& state) {
  const SystemConfig c;
  EpisodeSettings es;
  es.n_slots = 10000;
  es.q = CacheVector::uniform(c.n_files, 0.5);
  es.policy = static_cast<Policy>(state.range(0));
  es.baseline.kappa = es.policy == Policy::baseline1 ? 1e5 : 1e10;
  es.baseline.id = es.policy == Policy::baseline1 ? 1 : es.policy == Policy::baseline2 ? 2 : 3;
  for (auto _ : state) {
    Rng rng(3);
    benchmark::DoNotOptimize(run_episode(c, es, rng).metrics.total_power);
  }
  state.SetItemsProcessed(state.iterations() * es.n_slots);
}
BENCHMARK(BM_EpisodeSlots)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
