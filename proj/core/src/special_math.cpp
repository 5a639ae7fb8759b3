#include "cocache/special_math.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "cocache/error.hpp"

namespace cocache {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
// Largest y with a finite e^y.
constexpr double kMaxExpArg = 709.78;
// Below this E1(x) underflows to zero.
constexpr double kMinExpArg = 745.0;

// E1 by its power series, valid (and accurate) for 0 < x <= 1.
double e1_series(double x) {
  double sum = 0.0;
  double term = 1.0;  // (-x)^n / n!
  for (int n = 1; n < 200; ++n) {
    term *= -x / n;
    const double add = term / n;
    sum += add;
    if (std::abs(add) <= kEps * std::abs(sum)) break;
  }
  return -kEulerGamma - std::log(x) - sum;
}

// E1 by continued fraction (modified Lentz), x > 1.
double e1_continued_fraction(double x) {
  constexpr double kTiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) <= kEps) break;
  }
  return std::exp(-x + std::log(h));
}

// Ei(y) by its power series; all terms positive so it stays accurate for
// moderate y.
double ei_series(double y) {
  double sum = 0.0;
  double term = 1.0;  // y^n / n!
  for (int n = 1; n < 1000; ++n) {
    term *= y / n;
    const double add = term / n;
    sum += add;
    if (add <= kEps * sum) break;
  }
  return kEulerGamma + std::log(y) + sum;
}

// Ei(y) by its asymptotic expansion, truncated at the smallest term. y >= 40.
double ei_asymptotic(double y) {
  double sum = 1.0;
  double term = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double next = term * k / y;
    if (next >= term) break;
    term = next;
    sum += term;
    if (term <= kEps * sum) break;
  }
  return std::exp(y) / y * sum;
}

}  // namespace

E1Result exp_integral_e1_checked(double x) {
  if (std::isnan(x)) throw DomainError("exp_integral_e1: NaN argument");
  if (x == 0.0) throw DomainError("exp_integral_e1: logarithmic singularity at x = 0");
  if (x > 0.0) {
    if (x <= 1.0) return {e1_series(x), false};
    if (x > kMinExpArg) return {0.0, true};
    return {e1_continued_fraction(x), false};
  }
  const double y = -x;
  if (y > kMaxExpArg) return {-std::numeric_limits<double>::infinity(), true};
  const double ei = y <= 40.0 ? ei_series(y) : ei_asymptotic(y);
  return {-ei, false};
}

double exp_integral_e1(double x) { return exp_integral_e1_checked(x).value; }

double exp_integral_ei(double x) {
  if (!(x > 0.0)) throw DomainError("exp_integral_ei: argument must be positive");
  return -exp_integral_e1(-x);
}

double inverse_e1(double target) {
  if (!(target > 0.0) || !std::isfinite(target)) {
    throw DomainError("inverse_e1: target must be positive and finite");
  }
  // E1 is strictly decreasing on (0, inf); solve in log z for uniform scaling.
  BracketedProblem prob;
  prob.objective = [target](double u) { return exp_integral_e1(std::exp(u)) - target; };
  prob.lo = -700.0;
  prob.hi = 6.6;
  // A width criterion on u = ln z is a relative criterion on z.
  prob.tol_abs = 1e-15;
  prob.tol_rel = 4.0 * kEps;
  prob.max_iter = 400;
  return std::exp(find_root(prob));
}

double water_filling_mean_power(double level) {
  if (!(level > 0.0)) return 0.0;
  const double z = 1.0 / level;
  if (z > kMinExpArg) return 0.0;
  return level * std::exp(-z) - exp_integral_e1(z);
}

double water_filling_mean_log_gain(double level) {
  if (!(level > 0.0)) return 0.0;
  const double z = 1.0 / level;
  if (z > kMinExpArg) return 0.0;
  return exp_integral_e1(z);
}

double find_root(const BracketedProblem& p) {
  if (!p.objective) throw BracketError("find_root: empty objective");
  if (!(p.lo < p.hi)) throw BracketError("find_root: requires lo < hi");

  double a = p.lo;
  double b = p.hi;
  double fa = p.objective(a);
  double fb = p.objective(b);
  if (!std::isfinite(fa) || !std::isfinite(fb)) {
    std::ostringstream os;
    os << "find_root: objective not finite at bracket [" << a << ", " << b << "]";
    throw BracketError(os.str());
  }
  if (std::abs(fa) <= p.tol_abs) return a;
  if (std::abs(fb) <= p.tol_abs) return b;
  if (std::signbit(fa) == std::signbit(fb)) {
    std::ostringstream os;
    os << "find_root: no sign change on [" << a << ", " << b << "] (f=" << fa << ", " << fb
       << ")";
    throw BracketError(os.str());
  }

  auto best = [&] { return std::abs(fa) < std::abs(fb) ? a : b; };

  // Illinois-modified secant; scaled copies of the endpoint values drive the
  // secant while fa/fb keep the true values.
  double sa = fa;
  double sb = fb;
  int side = 0;  // which end was retained last: -1 = a, +1 = b
  double width_1 = b - a;
  double width_2 = b - a;
  bool bisect = false;

  for (int it = 0; it < p.max_iter; ++it) {
    double x = 0.5 * (a + b);
    if (!bisect) {
      const double s = b - sb * (b - a) / (sb - sa);
      if (s > a && s < b) x = s;
    }
    const double fx = p.objective(x);
    if (!std::isfinite(fx)) {
      std::ostringstream os;
      os << "find_root: objective not finite at x=" << x;
      throw ConvergenceError(os.str(), best());
    }
    if (std::abs(fx) <= p.tol_abs) return x;

    if (std::signbit(fx) == std::signbit(fa)) {
      a = x;
      fa = fx;
      sa = fx;
      if (side == +1) sb *= 0.5;
      side = +1;
    } else {
      b = x;
      fb = fx;
      sb = fx;
      if (side == -1) sa *= 0.5;
      side = -1;
    }

    const double r = best();
    const double width = b - a;
    if (width <= p.tol_rel * std::abs(r) + p.tol_abs) return r;

    bisect = width > 0.5 * width_2;
    width_2 = width_1;
    width_1 = width;
  }
  std::ostringstream os;
  os << "find_root: no convergence after " << p.max_iter << " iterations on [" << a << ", " << b
     << "]";
  throw ConvergenceError(os.str(), best());
}

}  // namespace cocache
