#include "cocache/channel_zf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cocache/error.hpp"

namespace cocache {
namespace {

// Reciprocal condition below which a co-user Gram matrix is treated as
// singular.
constexpr double kMinRcond = 1e-12;

Eigen::MatrixXcd inverse_gram(const ComplexMatrix& channels) {
  // G = conj(channels) so that (G v)_j = h_j^H v; Gram = G G^H.
  const Eigen::MatrixXcd g = channels.conjugate();
  const Eigen::MatrixXcd gram = g * g.adjoint();
  Eigen::LLT<Eigen::MatrixXcd> llt(gram);
  if (llt.info() != Eigen::Success || !(llt.rcond() > kMinRcond)) {
    std::ostringstream os;
    os << "zero_forcing: rank-deficient channel of " << channels.rows() << " users";
    throw DegenerateChannelError(os.str());
  }
  return llt.solve(Eigen::MatrixXcd::Identity(gram.rows(), gram.cols()));
}

}  // namespace

ChannelState sample_channel(Rng& rng, int m) {
  ChannelState out;
  out.m = m;
  sample_channel_into(rng, out);
  return out;
}

void sample_channel_into(Rng& rng, ChannelState& out) {
  if (out.m < 1) throw DomainError("sample_channel: antenna count must be >= 1");
  const int n = 2 * out.m;
  out.full.resize(n, n);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(2.0);
  // Column-major fill, real part drawn before imaginary part.
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < n; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      out.full(r, c) = std::complex<double>(re * scale, im * scale);
    }
  }
}

std::vector<int> sample_user_subset(Rng& rng, int n, int count) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < count; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

void zero_forcing(const ComplexMatrix& channels, ComplexMatrix& beamformers,
                  std::vector<double>& gains) {
  const Eigen::MatrixXcd inv = inverse_gram(channels);
  // W = G^H (G G^H)^{-1} = channels^T inv; column k satisfies h_j^H w_k = δ_jk.
  beamformers = channels.transpose() * inv;
  gains.resize(channels.rows());
  for (Eigen::Index k = 0; k < channels.rows(); ++k) {
    const double norm = beamformers.col(k).norm();
    beamformers.col(k) /= norm;
    gains[k] = 1.0 / (norm * norm);
  }
}

void zero_forcing_gains(const ComplexMatrix& channels, std::vector<double>& gains) {
  const Eigen::MatrixXcd inv = inverse_gram(channels);
  gains.resize(channels.rows());
  for (Eigen::Index k = 0; k < channels.rows(); ++k) gains[k] = 1.0 / inv(k, k).real();
}

BeamformOutcome select_and_beamform(const ChannelState& h, int s, Rng& rng) {
  BeamformOutcome out;
  select_and_beamform_into(h, s, rng, out);
  return out;
}

void select_and_beamform_into(const ChannelState& h, int s, Rng& rng, BeamformOutcome& out) {
  if (s != 0 && s != 1) throw DomainError("select_and_beamform: cache state must be 0 or 1");
  const int n = h.n_users();
  out.mode = s;
  out.gains.assign(n, 0.0);

  std::vector<double> served_gains;
  if (s == 1) {
    out.selected.resize(n);
    std::iota(out.selected.begin(), out.selected.end(), 0);
    zero_forcing(h.full, out.beamformers, served_gains);
  } else {
    out.selected = sample_user_subset(rng, n, h.m);
    ComplexMatrix rows(h.m, h.m);
    for (int j = 0; j < h.m; ++j) rows.row(j) = h.full.row(out.selected[j]).leftCols(h.m);
    zero_forcing(rows, out.beamformers, served_gains);
  }
  for (std::size_t j = 0; j < out.selected.size(); ++j) out.gains[out.selected[j]] = served_gains[j];
}

double instantaneous_rate(double g, double p, double bw) {
  return bw * std::log2(1.0 + g * p);
}

}  // namespace cocache
