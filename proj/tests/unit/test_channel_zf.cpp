#include <doctest.h>

#include <cmath>

#include "cocache/channel_zf.hpp"
#include "cocache/error.hpp"

using namespace cocache;

TEST_CASE("sample_channel is deterministic per seed") {
  Rng a(42);
  Rng b(42);
  const ChannelState x = sample_channel(a, 2);
  const ChannelState y = sample_channel(b, 2);
  CHECK(x.full.rows() == 4);
  CHECK(x.full.cols() == 4);
  CHECK(x.full == y.full);
}

TEST_CASE("sample_channel moments") {
  Rng rng(7);
  const int n = 100000;
  double pow_sum = 0.0;
  double re2 = 0.0;
  double im2 = 0.0;
  double re = 0.0;
  ChannelState h;
  h.m = 2;
  for (int i = 0; i < n; ++i) {
    sample_channel_into(rng, h);
    const std::complex<double> z = h.full(1, 2);
    pow_sum += std::norm(z);
    re2 += z.real() * z.real();
    im2 += z.imag() * z.imag();
    re += z.real();
  }
  CHECK(pow_sum / n == doctest::Approx(1.0).epsilon(0.01));
  CHECK(re2 / n == doctest::Approx(0.5).epsilon(0.02));
  CHECK(im2 / n == doctest::Approx(0.5).epsilon(0.02));
  CHECK(std::abs(re / n) < 0.01);
}

TEST_CASE("sample_user_subset") {
  Rng rng(3);
  std::vector<int> hits(4, 0);
  for (int i = 0; i < 20000; ++i) {
    const auto s = sample_user_subset(rng, 4, 2);
    REQUIRE(s.size() == 2);
    CHECK(s[0] < s[1]);
    for (int u : s) ++hits[u];
  }
  for (int c : hits) CHECK(c / 20000.0 == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("beamformer invariants in both modes") {
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const ChannelState h = sample_channel(rng, 2);
    for (int s : {0, 1}) {
      const BeamformOutcome out = select_and_beamform(h, s, rng);
      CHECK(out.mode == s);
      const int rows = s == 1 ? 4 : 2;
      REQUIRE(static_cast<int>(out.selected.size()) == (s == 1 ? 4 : 2));
      REQUIRE(out.beamformers.rows() == rows);
      const ComplexMatrix sub = s == 1 ? h.full : ComplexMatrix(h.bs_submatrix());
      for (std::size_t j = 0; j < out.selected.size(); ++j) {
        CHECK(out.beamformers.col(j).norm() == doctest::Approx(1.0).epsilon(1e-12));
        for (std::size_t i = 0; i < out.selected.size(); ++i) {
          const Eigen::VectorXcd hj = sub.row(out.selected[i]).transpose();
          const std::complex<double> ip = hj.dot(out.beamformers.col(j));
          if (i == j) {
            CHECK(std::norm(ip) == doctest::Approx(out.gains[out.selected[j]]).epsilon(1e-9));
          } else {
            CHECK(std::abs(ip) <= 1e-9 * hj.norm());
          }
        }
      }
      int positive = 0;
      for (double g : out.gains) {
        CHECK(g >= 0.0);
        positive += g > 0.0;
      }
      CHECK(positive == static_cast<int>(out.selected.size()));
    }
  }
}

TEST_CASE("single-user projection gives the full channel norm") {
  Rng rng(5);
  const ChannelState h = sample_channel(rng, 1);
  ComplexMatrix v;
  std::vector<double> g;
  zero_forcing(h.full.topRows(1), v, g);
  REQUIRE(g.size() == 1);
  CHECK(g[0] == doctest::Approx(h.full.row(0).squaredNorm()).epsilon(1e-12));
  std::vector<double> g2;
  zero_forcing_gains(h.full.topRows(1), g2);
  CHECK(g2[0] == doctest::Approx(g[0]).epsilon(1e-12));
}

TEST_CASE("zero_forcing_gains matches the beamformer gains") {
  Rng rng(9);
  for (int i = 0; i < 100; ++i) {
    const ChannelState h = sample_channel(rng, 2);
    ComplexMatrix v;
    std::vector<double> g;
    std::vector<double> g2;
    zero_forcing(h.full, v, g);
    zero_forcing_gains(h.full, g2);
    for (int k = 0; k < 4; ++k) CHECK(g2[k] == doctest::Approx(g[k]).epsilon(1e-9));
  }
}

TEST_CASE("rank-deficient channel is reported") {
  ChannelState h;
  h.m = 2;
  h.full = ComplexMatrix::Ones(4, 4);
  Rng rng(1);
  CHECK_THROWS_AS(select_and_beamform(h, 1, rng), DegenerateChannelError);
}

TEST_CASE("effective gain mixture at q_min = 0.5") {
  Rng rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ChannelState h;
  h.m = 2;
  BeamformOutcome out;
  const int n = 200000;
  int zeros = 0;
  double pos_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    sample_channel_into(rng, h);
    select_and_beamform_into(h, unit(rng) < 0.5 ? 1 : 0, rng, out);
    if (out.gains[0] > 0.0) {
      pos_sum += out.gains[0];
    } else {
      ++zeros;
    }
  }
  CHECK(std::abs(static_cast<double>(zeros) / n - 0.25) <= 0.01);
  CHECK(std::abs(pos_sum / (n - zeros) - 1.0) <= 0.02);
}

TEST_CASE("instantaneous_rate") {
  CHECK(instantaneous_rate(1.0, 0.0, 1e6) == 0.0);
  CHECK(instantaneous_rate(0.0, 5.0, 1e6) == 0.0);
  CHECK(instantaneous_rate(1.0, 1.0, 1e6) == doctest::Approx(1e6));
}
