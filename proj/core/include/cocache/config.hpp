#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cocache/baselines.hpp"
#include "cocache/cache_control.hpp"
#include "cocache/queue_cost.hpp"
#include "cocache/sim_engine.hpp"

namespace cocache {

struct SimSettings {
  Policy policy = Policy::proposed;
  long n_slots = 200000;
  double burn_in_fraction = 0.1;
  std::uint64_t seed = 1;
  bool trace = false;
};

struct CacheSettings {
  OptimizerSettings optimizer;
  long iterations = 2000;
  std::uint64_t seed = 1;
  std::vector<double> fixed_q;  // when set, simulate uses it instead of Algorithm E
};

struct RunConfig {
  SystemConfig system;
  BaselineConfig baseline;
  CacheSettings cache;
  SweepGrid sweep;
  SimSettings sim;
};

/// Parses an INI document with sections [system], [prices], [cache], [sweep]
/// and [sim], then applies `overrides` ("key=value" or "section.key=value").
/// Throws ConfigError naming the offending key; when `check_assumptions` is
/// set, parameter-condition violations raise AssumptionError.
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {},
                       bool check_assumptions = true);
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {},
                      bool check_assumptions = true);

/// Every key the parser understands, as "section.key".
std::vector<std::string> known_config_keys();

}  // namespace cocache
