#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <cmath>

#include "cocache/error.hpp"
#include "cocache/special_math.hpp"

using namespace cocache;

namespace {

// Independent E1 by quadrature of the defining integral.
double e1_quadrature(double x) {
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate([x](double t) { return std::exp(-(x + t)) / (x + t); });
}

// Ei(x) = gamma + ln x + sum x^n / (n n!).
double ei_series(double x) {
  double term = 1.0;
  double sum = 0.0;
  for (int n = 1; n < 200; ++n) {
    term *= x / n;
    sum += term / n;
  }
  return kEulerGamma + std::log(x) + sum;
}

}  // namespace

TEST_CASE("E1 at +-1") {
  CHECK(exp_integral_e1(1.0) == doctest::Approx(0.219383934395520).epsilon(1e-14));
  CHECK(exp_integral_e1(-1.0) == doctest::Approx(-1.895117816355937).epsilon(1e-14));
  CHECK(exp_integral_e1(-1.0) == doctest::Approx(-ei_series(1.0)).epsilon(1e-13));
}

TEST_CASE("E1 agrees with quadrature and with boost over a wide range") {
  for (double x = 1e-8; x < 700.0; x *= 1.37) {
    const double ours = exp_integral_e1(x);
    CHECK(ours == doctest::Approx(boost::math::expint(1, x)).epsilon(1e-13));
    if (x < 200.0) CHECK(ours == doctest::Approx(e1_quadrature(x)).epsilon(1e-10));
  }
  for (double x = 0.01; x < 40.0; x *= 1.5) {
    CHECK(exp_integral_e1(-x) == doctest::Approx(-boost::math::expint(x)).epsilon(1e-13));
    CHECK(exp_integral_ei(x) == doctest::Approx(boost::math::expint(x)).epsilon(1e-13));
  }
}

TEST_CASE("E1 asymptotic envelope") {
  for (double x : {10.0, 50.0, 300.0}) {
    const double e1 = exp_integral_e1(x);
    CHECK(e1 > 0.0);
    CHECK(e1 < std::exp(-x) / x);
    CHECK(std::abs(e1 * x * std::exp(x) - 1.0) < 1.0 / x);
  }
}

TEST_CASE("E1 domain and saturation") {
  CHECK_THROWS_AS(exp_integral_e1(0.0), DomainError);
  CHECK_THROWS_AS(exp_integral_e1(std::nan("")), DomainError);
  const E1Result big = exp_integral_e1_checked(-1000.0);
  CHECK(big.saturated);
  CHECK(std::isinf(big.value));
  CHECK(big.value < 0.0);
  const E1Result tiny = exp_integral_e1_checked(1000.0);
  CHECK(tiny.value >= 0.0);
  CHECK(!exp_integral_e1_checked(2.0).saturated);
}

TEST_CASE("E1 is decreasing on the positive axis") {
  double prev = exp_integral_e1(1e-6);
  for (double x = 2e-6; x < 50.0; x *= 1.2) {
    const double v = exp_integral_e1(x);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("inverse_e1 round trip") {
  for (double t : {1e-10, 1e-3, 0.2, 1.3862943611198906, 5.0, 30.0}) {
    const double z = inverse_e1(t);
    CHECK(z > 0.0);
    CHECK(exp_integral_e1(z) == doctest::Approx(t).epsilon(1e-12));
  }
}

TEST_CASE("water-filling closed forms against quadrature") {
  for (double w : {0.1, 1.0, 7.0, 40.0}) {
    boost::math::quadrature::exp_sinh<double> integrator;
    const double lo = 1.0 / w;
    const double power =
        integrator.integrate([&](double t) { return (w - 1.0 / (lo + t)) * std::exp(-(lo + t)); });
    const double logg =
        integrator.integrate([&](double t) { return std::log(w * (lo + t)) * std::exp(-(lo + t)); });
    CHECK(water_filling_mean_power(w) == doctest::Approx(power).epsilon(1e-10));
    CHECK(water_filling_mean_log_gain(w) == doctest::Approx(logg).epsilon(1e-10));
  }
  CHECK(water_filling_mean_power(0.0) == 0.0);
  CHECK(water_filling_mean_power(-3.0) == 0.0);
  CHECK(water_filling_mean_log_gain(-1.0) == 0.0);
}

TEST_CASE("find_root examples") {
  BracketedProblem p;
  p.objective = [](double t) { return t * t - 2.0; };
  p.lo = 0.0;
  p.hi = 2.0;
  CHECK(find_root(p) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  p.objective = [](double t) { return t; };
  p.lo = -1.0;
  p.hi = 1.0;
  CHECK(std::abs(find_root(p)) <= 1e-12);

  p.objective = [](double t) { return exp_integral_e1(t) - 2.0 * kLn2; };
  p.lo = 0.05;
  p.hi = 0.5;
  p.tol_abs = 1e-14;
  p.tol_rel = 1e-15;
  const double r = find_root(p);
  CHECK(std::abs(exp_integral_e1(r) - 2.0 * kLn2) < 1e-12);
}

TEST_CASE("find_root errors") {
  BracketedProblem p;
  p.objective = [](double t) { return t * t + 1.0; };
  p.lo = -1.0;
  p.hi = 1.0;
  CHECK_THROWS_AS(find_root(p), BracketError);

  p.objective = [](double t) { return std::cbrt(t - 0.3); };
  p.lo = 0.0;
  p.hi = 1.0;
  p.tol_abs = 0.0;
  p.tol_rel = 0.0;
  p.max_iter = 3;
  try {
    find_root(p);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.best_iterate() >= 0.0);
    CHECK(e.best_iterate() <= 1.0);
  }
}

TEST_CASE("find_root accepts an endpoint root") {
  BracketedProblem p;
  p.objective = [](double t) { return t - 1.0; };
  p.lo = 0.0;
  p.hi = 1.0;
  CHECK(find_root(p) == doctest::Approx(1.0));
}
