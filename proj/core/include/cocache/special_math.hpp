#pragma once

#include <functional>

namespace cocache {

inline constexpr double kEulerGamma = 0.57721566490153286060651209;
inline constexpr double kLn2 = 0.69314718055994530941723212;
inline constexpr double kE = 2.71828182845904523536028747;

struct E1Result {
  double value = 0.0;
  // Set when |x| is past the representable exponent range and `value` holds a
  // signed saturation (-inf for large negative x) instead of the true value.
  bool saturated = false;
};

/// Exponential integral E1(x) = int_x^inf e^{-t}/t dt.
///
/// For x < 0 this returns the principal-value continuation -Ei(-x). Throws
/// DomainError at x == 0 and for NaN.
double exp_integral_e1(double x);

/// Same as exp_integral_e1 but reports saturation instead of returning an
/// overflowed value silently.
E1Result exp_integral_e1_checked(double x);

/// Ei(x) for x > 0 (principal value). Equals -E1(-x).
double exp_integral_ei(double x);

/// z > 0 with E1(z) = target, for target > 0.
double inverse_e1(double target);

/// Mean power of water-filling p = (level - 1/g)^+ against a unit-mean
/// exponential gain: level e^{-1/level} - E1(1/level). Zero for level <= 0.
double water_filling_mean_power(double level);

/// E[ln(level g) 1(level g > 1)] for a unit-mean exponential gain, which is
/// E1(1/level); multiply by B_W/ln2 for the mean rate. Zero for level <= 0.
double water_filling_mean_log_gain(double level);

struct BracketedProblem {
  std::function<double(double)> objective;
  double lo = 0.0;
  double hi = 1.0;
  double tol_abs = 1e-12;
  double tol_rel = 1e-12;
  int max_iter = 200;
};

/// Root of `objective` inside [lo, hi].
///
/// Bisection with secant acceleration; a secant step is only accepted while it
/// stays inside the bracket and the bracket keeps contracting by at least half
/// every two steps, otherwise the step falls back to bisection. Stops when
/// |objective(r)| <= tol_abs or the bracket width is <= tol_rel*|r| + tol_abs.
/// Throws BracketError without a sign change and ConvergenceError (carrying the
/// best iterate) when max_iter is exhausted.
double find_root(const BracketedProblem& problem);

}  // namespace cocache
