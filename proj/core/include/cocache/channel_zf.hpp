#pragma once

#include <Eigen/Dense>
#include <complex>
#include <random>
#include <vector>

namespace cocache {

using Rng = std::mt19937_64;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Channel from every antenna (M at the BS, then M at the RS) to every user.
// Row k holds h_k; the first m columns form the BS sub-channel h̄_k.
struct ChannelState {
  ComplexMatrix full;
  int m = 0;

  int n_users() const { return 2 * m; }
  auto bs_submatrix() const { return full.leftCols(m); }
};

struct BeamformOutcome {
  int mode = 0;                 // equals the cache state S
  std::vector<int> selected;    // ascending user indices
  ComplexMatrix beamformers;    // column j is the unit beamformer of selected[j]
  std::vector<double> gains;    // per user, 0 for unselected users
};

/// Draws an i.i.d. CN(0,1) channel for 2m users and 2m antennas.
ChannelState sample_channel(Rng& rng, int m);
void sample_channel_into(Rng& rng, ChannelState& out);

/// Uniform size-`count` subset of {0..n-1}, returned in ascending order.
std::vector<int> sample_user_subset(Rng& rng, int n, int count);

/// Mode 0 (s = 0): M users drawn uniformly, ZF over the BS antennas.
/// Mode 1 (s = 1): all 2M users, joint ZF over BS and RS antennas.
/// Throws DegenerateChannelError when the selected channels are rank deficient.
BeamformOutcome select_and_beamform(const ChannelState& h, int s, Rng& rng);
void select_and_beamform_into(const ChannelState& h, int s, Rng& rng, BeamformOutcome& out);

/// Zero-forcing on the rows of `channels` (one row per served user, entries are
/// h_k, not conjugated). Writes unit beamformers as columns of `beamformers`
/// and the effective gains |h_k^H v_k|^2.
void zero_forcing(const ComplexMatrix& channels, ComplexMatrix& beamformers,
                  std::vector<double>& gains);

/// ZF gains only, 1 / [(G G^H)^{-1}]_kk with G = conj(channels).
void zero_forcing_gains(const ComplexMatrix& channels, std::vector<double>& gains);

/// B_W log2(1 + g p).
double instantaneous_rate(double g, double p, double bw);

}  // namespace cocache
