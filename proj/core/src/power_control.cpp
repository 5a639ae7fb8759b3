#include "cocache/power_control.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "cocache/error.hpp"
#include "cocache/special_math.hpp"

namespace cocache {
namespace {

// E1(e^{6.6}) is already subnormal; smaller targets mean the level is 0 to
// working precision.
constexpr double kMinE1Target = 1e-290;
constexpr int kMaxExpansions = 200;

// Drain requirement in level units, mu_k(x) ln2 / B_W.
double drain_level_units(double x, const SystemConfig& cfg) {
  return playback_rate(x, cfg) * kLn2 / cfg.bw;
}

// g(x, w) - c_k(x): the power and drift part of the fixed-point equation.
double drift_part(double level, double xi, double drain) {
  if (!(level > 0.0)) return level * drain;
  return xi * water_filling_mean_power(level) -
         level * (xi * water_filling_mean_log_gain(level) - drain);
}

}  // namespace

double service_probability(double q_min) {
  if (!(q_min >= 0.0 && q_min <= 1.0)) throw DomainError("q_min must lie in [0, 1]");
  return 0.5 * (1.0 + q_min);
}

double f_to_level(double f, const SystemConfig& cfg) { return -f * cfg.bw / kLn2; }
double level_to_f(double level, const SystemConfig& cfg) { return -level * kLn2 / cfg.bw; }

double drift_balance_level(double x, double q_min, const SystemConfig& cfg) {
  if (!(x >= 0.0)) throw DomainError("drift_balance_level: queue length must be >= 0");
  const double target = drain_level_units(x, cfg) / service_probability(q_min);
  if (target < kMinE1Target) return 0.0;
  return 1.0 / inverse_e1(target);
}

double lambda_tilde(double x, double q_min, const SystemConfig& cfg) {
  return level_to_f(drift_balance_level(x, q_min, cfg), cfg);
}

double theta_tilde(double q_min, const SystemConfig& cfg, int k) {
  const double qc = q_circ(cfg, k);
  const double level = drift_balance_level(qc, q_min, cfg);
  return stage_cost(qc, cfg, k) + service_probability(q_min) * water_filling_mean_power(level);
}

double theta_tilde_f_form(double q_min, const SystemConfig& cfg, int k) {
  const double qc = q_circ(cfg, k);
  const double l = lambda_tilde(qc, q_min, cfg);
  const double a = l * cfg.bw / kLn2;
  const double xi = service_probability(q_min);
  return stage_cost(qc, cfg, k) - xi * (a * std::exp(1.0 / a) + exp_integral_e1(-1.0 / a));
}

double fixed_point_lhs_level(double x, double level, double q_min, const SystemConfig& cfg,
                             int k) {
  return stage_cost(x, cfg, k) +
         drift_part(level, service_probability(q_min), drain_level_units(x, cfg));
}

double fixed_point_lhs(double x, double f, double q_min, const SystemConfig& cfg, int k) {
  return fixed_point_lhs_level(x, f_to_level(f, cfg), q_min, cfg, k);
}

PolicyTables::PolicyTables(const SystemConfig& cfg, double q_min, bool build_memo)
    : cfg_(cfg), q_min_(q_min), xi_(service_probability(q_min)) {
  const int n = cfg.n_users();
  q_circ_.resize(n);
  theta_.resize(n);
  level_qcirc_.resize(n);
  price_class_.resize(n);

  std::vector<int> class_rep;  // first user of each price class
  for (int k = 0; k < n; ++k) {
    q_circ_[k] = cocache::q_circ(cfg, k);
    level_qcirc_[k] = drift_balance_level(q_circ_[k], q_min, cfg);
    theta_[k] = stage_cost(q_circ_[k], cfg, k) + xi_ * water_filling_mean_power(level_qcirc_[k]);
    int cls = -1;
    for (std::size_t c = 0; c < class_rep.size(); ++c) {
      const int r = class_rep[c];
      if (cfg.beta[r] == cfg.beta[k] && cfg.gamma[r] == cfg.gamma[k]) cls = static_cast<int>(c);
    }
    if (cls < 0) {
      cls = static_cast<int>(class_rep.size());
      class_rep.push_back(k);
    }
    price_class_[k] = cls;
  }

  if (!build_memo) return;
  // Node 0 sits at x = 0, the rest are geometric from 1 bit to 4 W_H.
  nodes_.resize(kMemoNodes);
  nodes_[0] = 0.0;
  const double ratio = std::log(4.0 * cfg.w_high) / (kMemoNodes - 2);
  for (int i = 1; i < kMemoNodes; ++i) nodes_[i] = std::exp(ratio * (i - 1));
  nodes_.back() = 4.0 * cfg.w_high;

  memo_.resize(class_rep.size());
  for (std::size_t c = 0; c < class_rep.size(); ++c) {
    memo_[c].resize(kMemoNodes);
    for (int i = 0; i < kMemoNodes; ++i) {
      memo_[c][i] = solve_level_impl(class_rep[c], nodes_[i]);
    }
  }
}

double PolicyTables::solve_level_impl(int k, double x) const {
  if (!(x >= 0.0) || !std::isfinite(x)) {
    std::ostringstream os;
    os << "solve_f_tilde: queue length " << x << " must be finite and >= 0";
    throw DomainError(os.str());
  }
  const double qc = q_circ_[k];
  if (x == qc) return level_qcirc_[k];

  const double drain = drain_level_units(x, cfg_);
  const double balance = drift_balance_level(x, q_min_, cfg_);
  // g(x, w) - theta_k, grouped so that nearly equal terms cancel first.
  const double cost_gap = stage_cost(x, cfg_, k) - stage_cost(qc, cfg_, k);
  const double theta_power = xi_ * water_filling_mean_power(level_qcirc_[k]);
  auto residual = [&](double w) { return cost_gap + (drift_part(w, xi_, drain) - theta_power); };

  const double at_balance = residual(balance);
  if (at_balance <= 0.0) return balance;

  BracketedProblem prob;
  prob.objective = residual;
  prob.tol_abs = 1e-14;
  prob.tol_rel = 4.0 * std::numeric_limits<double>::epsilon();
  prob.max_iter = 400;

  if (x < qc) {
    // Residual decreases for w above the balance level.
    double delta = 0.5 * std::abs(balance) + 1.0;
    double hi = balance + delta;
    int n = 0;
    while (!(residual(hi) < 0.0)) {
      if (++n > kMaxExpansions || !std::isfinite(hi)) {
        std::ostringstream os;
        os << "solve_f_tilde: bracket expansion failed (x=" << x << ", branch=low, bracket=["
           << balance << ", " << hi << "] in level units)";
        throw ConvergenceError(os.str(), hi);
      }
      delta *= 2.0;
      hi = balance + delta;
    }
    prob.lo = balance;
    prob.hi = hi;
  } else {
    // Residual increases in w up to the balance level; below w = 0 it is affine.
    const double at_zero = residual(0.0);
    if (at_zero >= 0.0) {
      crossings_->fetch_add(1, std::memory_order_relaxed);
      return drain > 0.0 ? -at_zero / drain : 0.0;
    }
    prob.lo = 0.0;
    prob.hi = balance;
  }
  try {
    return find_root(prob);
  } catch (const BracketError& e) {
    std::ostringstream os;
    os << "solve_f_tilde: x=" << x << ", branch=" << (x < qc ? "low" : "high") << ", bracket=["
       << prob.lo << ", " << prob.hi << "]: " << e.what();
    throw ConvergenceError(os.str(), 0.5 * (prob.lo + prob.hi));
  }
}

double PolicyTables::solve_level(int k, double x) const {
  return solve_level_impl(k, x);
}

double PolicyTables::solve_f(int k, double x) const { return level_to_f(solve_level(k, x), cfg_); }

double PolicyTables::level_interpolated(int k, double x) const {
  if (memo_.empty() || !(x >= 0.0) || !(x <= nodes_.back())) return solve_level(k, x);
  const std::vector<double>& m = memo_[price_class_[k]];
  std::size_t i = 0;
  if (x >= 1.0) {
    const double ratio = std::log(nodes_.back()) / (kMemoNodes - 2);
    i = static_cast<std::size_t>(std::log(x) / ratio) + 1;
    i = std::min<std::size_t>(i, kMemoNodes - 2);
    while (i > 1 && nodes_[i] > x) --i;
    while (i + 2 < static_cast<std::size_t>(kMemoNodes) && nodes_[i + 1] < x) ++i;
  }
  const double t = (x - nodes_[i]) / (nodes_[i + 1] - nodes_[i]);
  return m[i] + t * (m[i + 1] - m[i]);
}

double PolicyTables::level(int k, double x) const {
  if (memo_.empty() || !(x >= 0.0) || !(x <= nodes_.back())) return solve_level(k, x);
  const double qc = q_circ_[k];
  if (x == qc) return level_qcirc_[k];

  const double drain = drain_level_units(x, cfg_);
  const double cost_gap = stage_cost(x, cfg_, k) - stage_cost(qc, cfg_, k);
  const double theta_power = xi_ * water_filling_mean_power(level_qcirc_[k]);
  if (x > qc && cost_gap - theta_power >= 0.0) {
    crossings_->fetch_add(1, std::memory_order_relaxed);
    return drain > 0.0 ? -(cost_gap - theta_power) / drain : 0.0;
  }

  // Newton polish of the interpolated level. The slope of the residual is
  // drain - xi E1(1/w); its sign identifies the branch the iterate is on.
  const double tol = 1e-10 * std::max(1.0, theta_[k]);
  double w = level_interpolated(k, x);
  for (int it = 0; it < 8 && w > 0.0; ++it) {
    const double e1 = water_filling_mean_log_gain(w);
    const double r = cost_gap + (xi_ * water_filling_mean_power(w) - w * (xi_ * e1 - drain)) -
                     theta_power;
    const double slope = drain - xi_ * e1;
    const bool right_side = x < qc ? slope < 0.0 : slope > 0.0;
    if (!right_side) break;
    const double step = r / slope;
    if (std::abs(r) <= tol && std::abs(step) <= 1e-12 * w) return w - step;
    w -= step;
  }
  return solve_level(k, x);
}

double PolicyTables::relative_value(int k, double x) const {
  const double qc = q_circ_.at(k);
  if (x == qc) return 0.0;
  auto f = [&](double s) { return solve_f(k, s); };
  const double lo = std::min(x, qc);
  const double hi = std::max(x, qc);
  double integral = 0.0;
  // The playback kink at W_L is the only non-smooth point of f_tilde.
  if (lo < cfg_.w_low && hi > cfg_.w_low) {
    integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, cfg_.w_low,
                                                                              10, 1e-10) +
               boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, cfg_.w_low, hi,
                                                                              10, 1e-10);
  } else {
    integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 10, 1e-10);
  }
  return x > qc ? integral : -integral;
}

double solve_f_tilde(double x, const PolicyTables& tables, int k) { return tables.solve_f(k, x); }

double allocate_power_level(double level, double g) {
  if (!(g > 0.0) || !(level > 0.0)) return 0.0;
  return std::max(level - 1.0 / g, 0.0);
}

double allocate_power(double f_tilde, double g, const SystemConfig& cfg) {
  return allocate_power_level(f_to_level(f_tilde, cfg), g);
}

void policy_step_into(std::span<const double> queues, std::span<const double> gains,
                      const PolicyTables& tables, std::vector<double>& powers) {
  const std::size_t n = queues.size();
  powers.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(gains[k] > 0.0)) continue;
    powers[k] = allocate_power_level(tables.level(static_cast<int>(k), queues[k]), gains[k]);
  }
}

std::vector<double> policy_step(std::span<const double> queues, const BeamformOutcome& outcome,
                                const PolicyTables& tables) {
  std::vector<double> powers;
  policy_step_into(queues, outcome.gains, tables, powers);
  return powers;
}

}  // namespace cocache
