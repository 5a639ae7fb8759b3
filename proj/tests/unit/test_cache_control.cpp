#include <doctest.h>

#include <boost/math/special_functions/expint.hpp>
#include <cmath>

#include "cocache/cache_control.hpp"
#include "cocache/special_math.hpp"

using namespace cocache;

TEST_CASE("surrogate constants") {
  const SystemConfig c;
  const SurrogateConstants sc = surrogate_constants(c, 0.5);
  const double cc = c.mu0 * kLn2 / c.bw;
  CHECK(sc.c == doctest::Approx(cc));
  CHECK(sc.xi == 0.75);
  CHECK(sc.a2 == doctest::Approx(boost::math::expint(1, std::exp(-cc))).epsilon(1e-13));
  CHECK(sc.a1 == doctest::Approx(-cc * std::exp(-std::exp(-cc)) + sc.a2).epsilon(1e-13));
  const double xi = sc.xi;
  CHECK(surrogate_user_term(sc) ==
        doctest::Approx(xi * std::exp(-sc.a1 + cc / xi) - (sc.a2 + kE) * xi + kE).epsilon(1e-13));
}

TEST_CASE("c_hat decreases with the CoMP probability") {
  const SystemConfig c;
  CHECK(c_hat_at_qmin(1.0, c) < c_hat_at_qmin(0.0, c));
  double prev = c_hat_at_qmin(0.0, c);
  for (double q = 0.05; q <= 1.0; q += 0.05) {
    const double v = c_hat_at_qmin(q, c);
    CHECK(v < prev);
    prev = v;
  }
  const Urp pi{{0, 1, 2, 3}};
  CHECK(c_hat(CacheVector::uniform(6, 0.3), pi, c) == doctest::Approx(c_hat_at_qmin(0.3, c)));
}

TEST_CASE("c_hat is midpoint convex in q") {
  const SystemConfig c;
  Rng rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<double> rho = c.popularity;
  for (int i = 0; i < 100; ++i) {
    const Urp pi = sample_urp(rng, rho, c.n_users());
    std::vector<double> a(6), b(6), m(6);
    for (int l = 0; l < 6; ++l) {
      a[l] = u(rng);
      b[l] = u(rng);
      m[l] = 0.5 * (a[l] + b[l]);
    }
    const double mid = c_hat(CacheVector(m), pi, c);
    const double avg = 0.5 * (c_hat(CacheVector(a), pi, c) + c_hat(CacheVector(b), pi, c));
    CHECK(mid <= avg + 1e-12 * std::abs(avg));
  }
}

TEST_CASE("subgradient components") {
  const SystemConfig c;
  const Urp pi{{0, 1, 1, 2}};
  const CacheVector q({0.7, 0.4, 0.6, 0.5, 0.5, 0.5});
  const auto g = noisy_subgradient(q, pi, c);
  REQUIRE(g.size() == 6);
  // Files nobody requests and requested files above q_min see only the price.
  for (int l : {0, 2, 3, 4, 5}) CHECK(g[l] == doctest::Approx(c.eta * c.file_sizes[l]));

  // Central difference of the one-sample objective at the unique argmin file.
  const double h = 1e-6;
  CacheVector up = q;
  CacheVector dn = q;
  up.set(1, 0.4 + h);
  dn.set(1, 0.4 - h);
  const double fd = (objective_sample(up, pi, c) - objective_sample(dn, pi, c)) / (2 * h);
  CHECK(g[1] == doctest::Approx(fd).epsilon(1e-6));
  CHECK(g[1] < c.eta * c.file_sizes[1]);
}

TEST_CASE("subgradient tie goes to the lowest user index") {
  const SystemConfig c;
  const Urp pi{{3, 1, 1, 3}};
  const auto g = noisy_subgradient(CacheVector::uniform(6, 0.4), pi, c);
  CHECK(g[3] < c.eta * c.file_sizes[3]);
  CHECK(g[1] == doctest::Approx(c.eta * c.file_sizes[1]));
}

TEST_CASE("subgradient step projects onto the unit box") {
  SystemConfig c;
  c.eta = 1e-6;  // storage price dominates
  OptimizerSettings s;
  s.q_init = 0.0;
  s.sigma0 = 1.0;
  OptimizerState st = make_optimizer(c, s);
  const Urp pi{{0, 1, 2, 3}};
  subgradient_step(st, pi, c);
  for (double v : st.q.values()) CHECK(v == 0.0);
  CHECK(st.iteration == 2);

  Rng rng(5);
  OptimizerSettings fast;
  fast.sigma0 = 1.0;
  const OptimizerState big = run_cache_optimization(c, 5, rng, fast);
  for (double v : big.q.values()) CHECK(v == 0.0);
}

TEST_CASE("optimizer invariants and determinism") {
  const SystemConfig c;
  Rng a(77);
  Rng b(77);
  const OptimizerState x = run_cache_optimization(c, 500, a);
  const OptimizerState y = run_cache_optimization(c, 500, b);
  REQUIRE(x.trace.size() == 500);
  for (std::size_t i = 0; i < x.trace.size(); ++i) {
    CHECK(x.trace[i].iter >= 1);
    CHECK(x.trace[i].u_sample == y.trace[i].u_sample);
    CHECK(x.trace[i].q == y.trace[i].q);
    for (double v : x.trace[i].q) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
  CHECK(x.sigma0 == default_sigma0(CacheVector::uniform(6, 0.5), c));
  CHECK(x.sigma0 > 0.0);
}

TEST_CASE("default step moves each coordinate by at most 0.05") {
  const SystemConfig c;
  const CacheVector q0 = CacheVector::uniform(6, 0.5);
  const double s0 = default_sigma0(q0, c);
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto g = noisy_subgradient(q0, sample_urp(rng, c.popularity, 4), c);
    for (double v : g) CHECK(std::abs(s0 * v) <= 0.05 + 1e-12);
  }
}
