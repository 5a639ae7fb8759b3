#pragma once

#include <atomic>
#include <memory>
#include <span>
#include <vector>

#include "cocache/channel_zf.hpp"
#include "cocache/queue_cost.hpp"

namespace cocache {

// Throughout this module the per-user derivative f of the approximate relative
// value function is handled through the equivalent water level
//   w = -f B_W / ln 2,
// so that the water-filling power is p = (w - 1/g)^+. w > 0 <=> f < 0.

/// (1 + q_min) / 2: probability that a given user is scheduled in a slot.
double service_probability(double q_min);

double f_to_level(double f, const SystemConfig& cfg);
double level_to_f(double level, const SystemConfig& cfg);

/// Water level that makes the mean served rate equal mu_k(x):
/// xi (B_W/ln2) E1(1/w) = mu_k(x). Zero when x = 0 (no service needed).
double drift_balance_level(double x, double q_min, const SystemConfig& cfg);

/// lambda_tilde(x) in f units: the unique non-positive root of
/// (B_W (1+q_min) / (2 ln2)) E1(-ln2 / (lambda B_W)) = mu_k(x).
/// Returns 0 at x = 0, the limit of the root as the required rate vanishes.
double lambda_tilde(double x, double q_min, const SystemConfig& cfg);

/// theta_tilde_k = c_k(Q°) + xi (w e^{-1/w} - E1(1/w)) with w the drift-balance
/// level at Q°.
double theta_tilde(double q_min, const SystemConfig& cfg, int k);

/// Same quantity evaluated literally in f units,
/// c_k(Q°) - xi ((l B/ln2) e^{ln2/(l B)} + E1(-ln2/(l B))), l = lambda_tilde(Q°).
double theta_tilde_f_form(double q_min, const SystemConfig& cfg, int k);

/// Left-hand side g(x, f) of the per-user fixed-point equation. For f >= 0 the
/// optimal power is zero and the expression reduces to c_k(x) - mu_k(x) f.
double fixed_point_lhs(double x, double f, double q_min, const SystemConfig& cfg, int k);

/// Same, in the water-level variable.
double fixed_point_lhs_level(double x, double level, double q_min, const SystemConfig& cfg,
                             int k);

// Per-configuration state of the power controller: Q°, theta_tilde, lambda_tilde(Q°)
// per user and a memoised interpolation of f_tilde over the queue axis.
class PolicyTables {
 public:
  static constexpr int kMemoNodes = 2048;

  PolicyTables(const SystemConfig& cfg, double q_min, bool build_memo = true);

  double q_min() const { return q_min_; }
  double xi() const { return xi_; }
  int n_users() const { return static_cast<int>(q_circ_.size()); }
  double q_circ(int k) const { return q_circ_[k]; }
  double theta_tilde(int k) const { return theta_[k]; }
  double lambda_tilde_at_qcirc(int k) const { return level_to_f(level_qcirc_[k], cfg_); }
  double level_at_qcirc(int k) const { return level_qcirc_[k]; }
  const SystemConfig& config() const { return cfg_; }
  bool has_memo() const { return !memo_.empty(); }

  /// Root of g(x, f) = theta_tilde_k on the branch selected by x vs Q°.
  double solve_f(int k, double x) const;
  double solve_level(int k, double x) const;

  /// Water level for the simulation loop: the memo interpolant refined by
  /// Newton steps on the fixed-point residual. Falls back to solve_level
  /// outside the memo range or when the refinement leaves the branch.
  double level(int k, double x) const;

  /// Raw linear interpolation over the log-spaced memo nodes.
  double level_interpolated(int k, double x) const;

  /// Approximate relative value function, int_{Q°}^{x} f_tilde(s) ds.
  double relative_value(int k, double x) const;

  /// Number of solves whose root landed at f >= 0 (zero-power region).
  long sign_crossings() const { return crossings_->load(); }

  std::span<const double> memo_nodes() const { return nodes_; }

 private:
  double solve_level_impl(int k, double x) const;

  SystemConfig cfg_;
  double q_min_ = 0.0;
  double xi_ = 0.5;
  std::vector<double> q_circ_;
  std::vector<double> theta_;
  std::vector<double> level_qcirc_;
  std::vector<int> price_class_;        // user -> index of its memo
  std::vector<double> nodes_;           // memo abscissae
  std::vector<std::vector<double>> memo_;  // per price class, level at nodes_
  std::shared_ptr<std::atomic<long>> crossings_ = std::make_shared<std::atomic<long>>(0);
};

/// f_tilde_k(x) through the tables' solver.
double solve_f_tilde(double x, const PolicyTables& tables, int k);

/// Multi-level water filling p = (-f B_W / ln2 - 1/g)^+; zero when g = 0.
double allocate_power(double f_tilde, double g, const SystemConfig& cfg);

/// Same, parameterised by the water level.
double allocate_power_level(double level, double g);

/// Per-user transmit powers for one slot.
std::vector<double> policy_step(std::span<const double> queues, const BeamformOutcome& outcome,
                                const PolicyTables& tables);
void policy_step_into(std::span<const double> queues, std::span<const double> gains,
                      const PolicyTables& tables, std::vector<double>& powers);

}  // namespace cocache
