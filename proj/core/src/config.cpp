#include "cocache/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "cocache/error.hpp"

namespace cocache {
namespace {

namespace pt = boost::property_tree;

struct KeySpec {
  const char* section;
  const char* key;
};

constexpr KeySpec kKeys[] = {
    {"system", "bw"},       {"system", "tau"},          {"system", "alpha"},
    {"system", "w_low"},    {"system", "w_high"},       {"system", "mu0"},
    {"system", "m"},        {"system", "n_files"},      {"system", "file_size"},
    {"system", "file_sizes"}, {"system", "segment_bits"}, {"system", "urp_hold_slots"},
    {"prices", "beta"},     {"prices", "gamma"},        {"prices", "eta"},
    {"prices", "kappa"},
    {"cache", "popularity"}, {"cache", "q_init"},       {"cache", "sigma0"},
    {"cache", "window"},    {"cache", "iterations"},    {"cache", "seed"},
    {"cache", "q"},
    {"sweep", "policy"},    {"sweep", "betas"},         {"sweep", "knobs"},
    {"sweep", "seeds"},     {"sweep", "n_slots"},       {"sweep", "burn_in"},
    {"sweep", "cache_opt_iters"}, {"sweep", "relay_gain_db"}, {"sweep", "threads"},
    {"sim", "policy"},      {"sim", "n_slots"},         {"sim", "burn_in"},
    {"sim", "seed"},        {"sim", "relay_gain_db"},   {"sim", "trace"},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string path_of(const std::string& section, const std::string& key) {
  return "[" + section + "]." + key;
}

// Flat view of the document: section -> key -> raw text.
using Table = std::map<std::string, std::map<std::string, std::string>>;

class Reader {
 public:
  explicit Reader(Table t) : t_(std::move(t)) {}

  std::optional<std::string> raw(const std::string& s, const std::string& k) const {
    auto si = t_.find(s);
    if (si == t_.end()) return std::nullopt;
    auto ki = si->second.find(k);
    if (ki == si->second.end()) return std::nullopt;
    return ki->second;
  }

  std::string require(const std::string& s, const std::string& k) const {
    auto v = raw(s, k);
    if (!v) throw ConfigError("missing required key " + path_of(s, k));
    return *v;
  }

  static double to_double(const std::string& s, const std::string& k, const std::string& v) {
    try {
      std::size_t used = 0;
      const double d = std::stod(v, &used);
      if (used == v.size()) return d;
    } catch (const std::exception&) {
    }
    throw ConfigError(path_of(s, k) + ": expected a number, got '" + v + "'");
  }

  static long to_long(const std::string& s, const std::string& k, const std::string& v) {
    const double d = to_double(s, k, v);
    if (d != static_cast<double>(static_cast<long>(d))) {
      throw ConfigError(path_of(s, k) + ": expected an integer, got '" + v + "'");
    }
    return static_cast<long>(d);
  }

  static std::vector<double> to_list(const std::string& s, const std::string& k,
                                     const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      out.push_back(to_double(s, k, item));
    }
    if (out.empty()) {
      throw ConfigError(path_of(s, k) + ": expected a comma-separated list of numbers");
    }
    return out;
  }

  double num(const std::string& s, const std::string& k, double def) const {
    auto v = raw(s, k);
    return v ? to_double(s, k, *v) : def;
  }
  double num(const std::string& s, const std::string& k) const {
    return to_double(s, k, require(s, k));
  }
  long integer(const std::string& s, const std::string& k, long def) const {
    auto v = raw(s, k);
    return v ? to_long(s, k, *v) : def;
  }
  long integer(const std::string& s, const std::string& k) const {
    return to_long(s, k, require(s, k));
  }
  std::optional<std::vector<double>> list(const std::string& s, const std::string& k) const {
    auto v = raw(s, k);
    if (!v) return std::nullopt;
    return to_list(s, k, *v);
  }
  bool flag(const std::string& s, const std::string& k, bool def) const {
    auto v = raw(s, k);
    if (!v) return def;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw ConfigError(path_of(s, k) + ": expected true or false, got '" + *v + "'");
  }
  Policy policy(const std::string& s, const std::string& k, Policy def) const {
    auto v = raw(s, k);
    if (!v) return def;
    try {
      return parse_policy(*v);
    } catch (const ConfigError& e) {
      throw ConfigError(path_of(s, k) + ": " + e.what());
    }
  }

 private:
  Table t_;
};

const KeySpec* find_key(const std::string& s, const std::string& k) {
  for (const KeySpec& ks : kKeys) {
    if (s == ks.section && k == ks.key) return &ks;
  }
  return nullptr;
}

void apply_override(Table& t, const std::string& ov) {
  const auto eq = ov.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("override '" + ov + "' must have the form key=value or section.key=value");
  }
  const std::string lhs = trim(ov.substr(0, eq));
  const std::string value = trim(ov.substr(eq + 1));
  std::string section;
  std::string key = lhs;
  const auto dot = lhs.find('.');
  if (dot != std::string::npos) {
    section = lhs.substr(0, dot);
    key = lhs.substr(dot + 1);
    if (!find_key(section, key)) throw ConfigError("override names unknown key " + path_of(section, key));
  } else {
    std::vector<std::string> hits;
    for (const KeySpec& ks : kKeys) {
      if (key == ks.key) hits.emplace_back(ks.section);
    }
    if (hits.empty()) throw ConfigError("override names unknown key '" + key + "'");
    if (hits.size() > 1) {
      std::string msg = "override key '" + key + "' is ambiguous; qualify it as one of";
      for (const auto& h : hits) msg += " " + h + "." + key;
      throw ConfigError(msg);
    }
    section = hits.front();
  }
  t[section][key] = value;
}

std::vector<std::uint64_t> to_seeds(const std::vector<double>& v, const std::string& key) {
  std::vector<std::uint64_t> out;
  for (double d : v) {
    if (!(d >= 0.0) || d != static_cast<double>(static_cast<std::uint64_t>(d))) {
      throw ConfigError(key + ": seeds must be non-negative integers");
    }
    out.push_back(static_cast<std::uint64_t>(d));
  }
  return out;
}

}  // namespace

std::vector<std::string> known_config_keys() {
  std::vector<std::string> out;
  for (const KeySpec& ks : kKeys) out.push_back(std::string(ks.section) + "." + ks.key);
  return out;
}

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides,
                       bool check_assumptions) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  Table table;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw ConfigError("key '" + section + "' appears outside a section");
    }
    for (const auto& [key, leaf] : body) {
      if (!find_key(section, key)) throw ConfigError("unknown key " + path_of(section, key));
      table[section][key] = trim(leaf.get_value<std::string>());
    }
  }
  for (const std::string& ov : overrides) apply_override(table, ov);
  const Reader r(std::move(table));

  RunConfig rc;
  SystemConfig& s = rc.system;
  s.bw = r.num("system", "bw");
  s.tau = r.num("system", "tau");
  s.alpha = r.num("system", "alpha");
  s.w_low = r.num("system", "w_low");
  s.w_high = r.num("system", "w_high");
  s.mu0 = r.num("system", "mu0");
  s.m = static_cast<int>(r.integer("system", "m"));
  s.n_files = static_cast<int>(r.integer("system", "n_files"));
  if (s.m < 1) throw ConfigError("[system].m: must be >= 1");
  if (s.n_files < 1) throw ConfigError("[system].n_files: must be >= 1");
  if (auto sizes = r.list("system", "file_sizes")) {
    if (static_cast<int>(sizes->size()) != s.n_files) {
      throw ConfigError("[system].file_sizes: expected n_files entries");
    }
    s.file_sizes = *sizes;
  } else if (auto one = r.raw("system", "file_size")) {
    s.file_sizes.assign(s.n_files, Reader::to_double("system", "file_size", *one));
  } else {
    throw ConfigError("missing required key [system].file_size (or [system].file_sizes)");
  }
  s.segment_bits = r.num("system", "segment_bits", s.segment_bits);
  s.urp_hold_slots = r.integer("system", "urp_hold_slots", s.urp_hold_slots);
  if (!(s.segment_bits > 0.0)) throw ConfigError("[system].segment_bits: must be positive");
  if (s.urp_hold_slots < 1) throw ConfigError("[system].urp_hold_slots: must be >= 1");

  const double beta = r.num("prices", "beta");
  const double gamma = r.num("prices", "gamma", beta);
  s.set_prices(beta, gamma);
  s.eta = r.num("prices", "eta", s.eta);
  if (!(s.eta >= 0.0)) throw ConfigError("[prices].eta: must be >= 0");
  rc.baseline.kappa = r.num("prices", "kappa", rc.baseline.kappa);
  if (!(rc.baseline.kappa > 0.0)) throw ConfigError("[prices].kappa: must be positive");

  s.popularity = *r.list("cache", "popularity");
  if (static_cast<int>(s.popularity.size()) != s.n_files) {
    throw ConfigError("[cache].popularity: expected n_files entries");
  }
  double total = 0.0;
  for (double p : s.popularity) {
    if (!(p >= 0.0)) throw ConfigError("[cache].popularity: entries must be >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("[cache].popularity: must sum to 1");
  CacheSettings& c = rc.cache;
  c.optimizer.q_init = r.num("cache", "q_init", c.optimizer.q_init);
  c.optimizer.sigma0 = r.num("cache", "sigma0", c.optimizer.sigma0);
  c.optimizer.window = static_cast<int>(r.integer("cache", "window", c.optimizer.window));
  c.iterations = r.integer("cache", "iterations", c.iterations);
  c.seed = static_cast<std::uint64_t>(r.integer("cache", "seed", 1));
  if (!(c.optimizer.q_init >= 0.0 && c.optimizer.q_init <= 1.0)) {
    throw ConfigError("[cache].q_init: must lie in [0, 1]");
  }
  if (c.optimizer.window < 1) throw ConfigError("[cache].window: must be >= 1");
  if (c.iterations < 0) throw ConfigError("[cache].iterations: must be >= 0");
  if (auto q = r.list("cache", "q")) {
    if (static_cast<int>(q->size()) != s.n_files) {
      throw ConfigError("[cache].q: expected n_files entries");
    }
    for (double v : *q) {
      if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("[cache].q: entries must lie in [0, 1]");
    }
    c.fixed_q = *q;
  }

  SweepGrid& g = rc.sweep;
  g.policy = r.policy("sweep", "policy", Policy::proposed);
  const std::vector<double> betas = r.list("sweep", "betas").value_or(std::vector<double>{beta});
  const std::vector<double> knobs =
      r.list("sweep", "knobs")
          .value_or(std::vector<double>{g.policy == Policy::proposed ? s.eta : rc.baseline.kappa});
  for (double b : betas) {
    for (double k : knobs) g.points.push_back({b, k});
  }
  g.seeds = to_seeds(r.list("sweep", "seeds").value_or(std::vector<double>{1, 2, 3}),
                     "[sweep].seeds");
  g.n_slots = r.integer("sweep", "n_slots", g.n_slots);
  g.burn_in_fraction = r.num("sweep", "burn_in", g.burn_in_fraction);
  g.cache_opt_iters = r.integer("sweep", "cache_opt_iters", c.iterations);
  g.relay_gain_db = r.num("sweep", "relay_gain_db", g.relay_gain_db);
  g.threads = static_cast<int>(r.integer("sweep", "threads", 0));
  try {
    validate_grid(g);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("[sweep]: ") + e.what());
  }
  if (!(g.burn_in_fraction >= 0.0 && g.burn_in_fraction < 1.0)) {
    throw ConfigError("[sweep].burn_in: must lie in [0, 1)");
  }

  SimSettings& sim = rc.sim;
  sim.policy = r.policy("sim", "policy", sim.policy);
  sim.n_slots = r.integer("sim", "n_slots", sim.n_slots);
  sim.burn_in_fraction = r.num("sim", "burn_in", sim.burn_in_fraction);
  sim.seed = static_cast<std::uint64_t>(r.integer("sim", "seed", 1));
  sim.trace = r.flag("sim", "trace", false);
  rc.baseline.relay_gain_db = r.num("sim", "relay_gain_db", rc.baseline.relay_gain_db);
  if (sim.n_slots < 1) throw ConfigError("[sim].n_slots: must be >= 1");
  if (!(sim.burn_in_fraction >= 0.0 && sim.burn_in_fraction < 1.0)) {
    throw ConfigError("[sim].burn_in: must lie in [0, 1)");
  }

  if (check_assumptions) {
    const auto issues = validate_assumptions(s);
    if (!issues.empty()) {
      std::string msg = "parameter conditions violated:";
      for (const auto& i : issues) msg += " " + i + ";";
      msg.pop_back();
      throw AssumptionError(msg);
    }
  }
  return rc;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides,
                      bool check_assumptions) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides, check_assumptions);
}

}  // namespace cocache
