// Command line front end: validate, simulate, sweep, cache-opt and oracle.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cocache/cache_control.hpp"
#include "cocache/config.hpp"
#include "cocache/csv.hpp"
#include "cocache/error.hpp"
#include "cocache/oracles.hpp"
#include "cocache/power_control.hpp"
#include "cocache/sim_engine.hpp"
#include "cocache/special_math.hpp"

namespace fs = std::filesystem;
using namespace cocache;

namespace {

enum Exit { kOk = 0, kConfig = 2, kAssumption = 3, kNumeric = 4 };

struct Options {
  std::string config = "configs/default.ini";
  std::vector<std::string> overrides;
  std::string out_dir;
  bool allow_invalid = false;
  std::string oracle = "all";
};

fs::path output_dir(const Options& o) {
  fs::path dir = o.out_dir;
  if (dir.empty()) {
    const char* env = std::getenv("COCACHE_OUT_DIR");
    dir = env && *env ? env : ".";
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ConfigError("output directory '" + dir.string() + "' is not writable");
  }
  return dir;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw ConfigError("cannot write '" + p.string() + "'");
  return f;
}

CacheVector cache_for_run(const RunConfig& rc) {
  if (!rc.cache.fixed_q.empty()) return CacheVector(rc.cache.fixed_q);
  Rng rng(rc.cache.seed);
  return run_cache_optimization(rc.system, rc.cache.iterations, rng, rc.cache.optimizer).q;
}

int cmd_validate(const Options& o) {
  const RunConfig rc = load_config(o.config, o.overrides, false);
  const SystemConfig& s = rc.system;
  const auto issues = validate_assumptions(s);
  std::printf("config=%s\n", o.config.c_str());
  if (issues.empty()) {
    std::printf("lambda0=%.12g\n", lambda0(s));
    for (int k = 0; k < s.n_users(); ++k) {
      std::printf("user%d.q_circ=%.12g beta_bound=%.12g\n", k + 1, q_circ(s, k),
                  beta_lower_bound(s, k));
    }
  }
  std::printf("violations=%zu\n", issues.size());
  for (const auto& i : issues) std::printf("violation: %s\n", i.c_str());
  return issues.empty() ? kOk : kAssumption;
}

int cmd_simulate(const Options& o) {
  const RunConfig rc = load_config(o.config, o.overrides, !o.allow_invalid);
  const fs::path dir = output_dir(o);
  EpisodeSettings es;
  es.policy = rc.sim.policy;
  es.n_slots = rc.sim.n_slots;
  es.burn_in_fraction = rc.sim.burn_in_fraction;
  es.baseline = rc.baseline;
  es.baseline.id = rc.sim.policy == Policy::baseline2 ? 2 : rc.sim.policy == Policy::baseline3 ? 3 : 1;
  es.q = rc.sim.policy == Policy::proposed ? cache_for_run(rc)
                                           : CacheVector::uniform(rc.system.n_files, 0.0);
  es.record_trace = rc.sim.trace;
  Rng rng(rc.sim.seed);
  const EpisodeResult res = run_episode(rc.system, es, rng);

  SweepRow row;
  row.policy = es.policy;
  row.beta = rc.system.beta.front();
  row.gamma = rc.system.gamma.front();
  row.knob = es.policy == Policy::proposed ? rc.system.eta : rc.baseline.kappa;
  row.seed = rc.sim.seed;
  row.n_slots = es.n_slots;
  row.metrics = res.metrics;
  {
    auto f = open_out(dir / "metrics.csv");
    write_sweep_csv(f, {row});
  }
  {
    auto f = open_out(dir / "users.csv");
    write_user_metrics_csv(f, res.metrics);
  }
  if (es.record_trace) {
    auto f = open_out(dir / "trace.csv");
    write_trace_csv(f, res.trace);
  }
  std::printf("avg_power_per_user=%s interruption_prob=%s overflow_prob=%s pr_comp=%s\n",
              format_number(res.metrics.avg_power_per_user()).c_str(),
              format_number(res.metrics.mean_interruption()).c_str(),
              format_number(res.metrics.mean_overflow()).c_str(),
              format_number(res.metrics.pr_comp).c_str());
  return kOk;
}

int cmd_sweep(const Options& o) {
  const RunConfig rc = load_config(o.config, o.overrides, !o.allow_invalid);
  const fs::path dir = output_dir(o);
  const SweepResult res = sweep(rc.sweep, rc.system);
  int failed = 0;
  for (const SweepRow& r : res.rows) {
    if (r.error.empty()) continue;
    ++failed;
    std::fprintf(stderr, "warning: point %zu seed %llu failed: %s\n", r.point,
                 static_cast<unsigned long long>(r.seed), r.error.c_str());
  }
  {
    auto f = open_out(dir / "sweep.csv");
    write_sweep_csv(f, res.rows);
  }
  {
    auto f = open_out(dir / "sweep_summary.csv");
    write_sweep_summary_csv(f, rc.sweep.policy, res.aggregates);
  }
  std::printf("rows=%zu failed=%d\n", res.rows.size(), failed);
  return failed == static_cast<int>(res.rows.size()) ? kNumeric : kOk;
}

int cmd_cache_opt(const Options& o) {
  const RunConfig rc = load_config(o.config, o.overrides, !o.allow_invalid);
  const fs::path dir = output_dir(o);
  Rng rng(rc.cache.seed);
  const OptimizerState st =
      run_cache_optimization(rc.system, rc.cache.iterations, rng, rc.cache.optimizer);
  auto f = open_out(dir / "cache_opt.csv");
  write_trajectory_csv(f, st.trace);
  std::printf("occupancy_bits=%s\n", format_number(occupancy_bits(st.q, rc.system.file_sizes)).c_str());
  return kOk;
}

int cmd_oracle(const Options& o) {
  const RunConfig rc = load_config(o.config, o.overrides, !o.allow_invalid);
  const fs::path dir = output_dir(o);
  const SystemConfig& s = rc.system;
  const bool all = o.oracle == "all";
  const double qm = 0.5;
  std::vector<OracleReport> reports;
  Rng rng(rc.sim.seed);
  bool known = all;

  if (all || o.oracle == "gain") {
    known = true;
    for (double q : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const GainCheck g = mc_effective_gain_check(q, 100000, rng, s.m);
      OracleReport r{"gain_q" + format_number(q), {}};
      r.add("zero_mass", g.zero_mass);
      r.add("tail_mean", g.tail_mean);
      r.add("ks_stat", g.ks_stat);
      r.add("ks_critical_1pct", g.ks_critical);
      reports.push_back(r);
    }
  }
  if (all || o.oracle == "water-filling") {
    known = true;
    const WaterFillingCheck w = mc_water_filling_check(s, qm, 1000000, rng);
    OracleReport r{"water_filling", {}};
    r.add("level", w.level);
    r.add("mc_power", w.mc_power);
    r.add("closed_power", w.closed_power);
    r.add("mc_rate_bps", w.mc_rate);
    r.add("closed_rate_bps", w.closed_rate);
    reports.push_back(r);
  }
  if (all || o.oracle == "tiny-mdp") {
    known = true;
    MdpDiscretisation d;
    const MdpResult m = tiny_mdp_average_cost(d, qm, s);
    OracleReport r{"tiny_mdp", {}};
    r.add("theta_vi", m.theta);
    r.add("theta_tilde", theta_tilde(qm, s, 0));
    r.add("iterations", static_cast<double>(m.iterations));
    r.add("span", m.span);
    reports.push_back(r);
  }
  if (all || o.oracle == "surrogate") {
    known = true;
    OracleReport r{"surrogate", {}};
    for (const SurrogateGap& g : surrogate_error_scan({0.1, 1, 2, 4, 8}, qm, s)) {
      r.add("rel_gap_ratio" + format_number(g.ratio), g.rel_gap);
    }
    reports.push_back(r);
  }
  if (all || o.oracle == "service-rate") {
    known = true;
    Urp pi;
    pi.pi.assign(s.n_users(), 0);
    const ServiceRateCheck c = service_rate_identity_check(
        s, CacheVector::uniform(s.n_files, qm), pi, rc.sim.n_slots, rng);
    OracleReport r{"service_rate", {}};
    r.add("q_min", c.q_min);
    r.add("r_bar_a_bits_per_slot", c.r_bar_a);
    r.add("r_bar_b_bits_per_slot", c.r_bar_b);
    r.add("predicted_bits_per_slot", c.predicted);
    r.add("r_bar_b_bps", c.r_bar_b / s.tau);
    r.add("gap", c.gap);
    reports.push_back(r);
  }
  if (!known) {
    throw ConfigError("unknown oracle '" + o.oracle +
                      "' (expected gain, water-filling, tiny-mdp, surrogate, service-rate or all)");
  }
  auto f = open_out(dir / "oracle.txt");
  for (const OracleReport& r : reports) {
    std::cout << r.to_text();
    f << r.to_text();
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cache-enabled opportunistic CoMP video streaming simulator"};
  app.require_subcommand(1);
  Options o;
  auto common = [&o](CLI::App* sub) {
    sub->add_option("-c,--config", o.config, "INI configuration file");
    sub->add_option("-s,--set", o.overrides, "Override, key=value or section.key=value");
    sub->add_option("-o,--out", o.out_dir, "Output directory (default: $COCACHE_OUT_DIR or .)");
    sub->add_flag("--allow-invalid", o.allow_invalid, "Run even if parameter conditions fail");
  };
  auto* v = app.add_subcommand("validate", "Check the parameter conditions of a config");
  common(v);
  auto* sim = app.add_subcommand("simulate", "Run one closed-loop episode");
  common(sim);
  auto* sw = app.add_subcommand("sweep", "Run a tradeoff sweep");
  common(sw);
  auto* co = app.add_subcommand("cache-opt", "Run the cache optimisation loop");
  common(co);
  auto* orc = app.add_subcommand("oracle", "Run the independent verifiers");
  common(orc);
  orc->add_option("--name", o.oracle,
                  "gain, water-filling, tiny-mdp, surrogate, service-rate or all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::fprintf(stderr, "error: usage: %s\n", e.what());
    return kConfig;
  }

  try {
    if (v->parsed()) return cmd_validate(o);
    if (sim->parsed()) return cmd_simulate(o);
    if (sw->parsed()) return cmd_sweep(o);
    if (co->parsed()) return cmd_cache_opt(o);
    if (orc->parsed()) return cmd_oracle(o);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: config: %s\n", e.what());
    return kConfig;
  } catch (const AssumptionError& e) {
    std::fprintf(stderr, "error: assumption: %s\n", e.what());
    return kAssumption;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: numeric: %s\n", e.what());
    return kNumeric;
  }
  return kOk;
}
