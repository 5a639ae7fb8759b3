#pragma once

#include <span>
#include <vector>

#include "cocache/channel_zf.hpp"
#include "cocache/queue_cost.hpp"

namespace cocache {

struct BaselineConfig {
  double kappa = 1.0;           // power price
  double relay_gain_db = 20.0;  // BS-RS path gain over the user channels
  int id = 1;                   // 1, 2 or 3
};

void validate_baseline(const BaselineConfig& bl);

/// argmax_p B_W log2(1 + g p) - kappa p = (B_W/(kappa ln2) - 1/g)^+.
double baseline1_power(double g, const SystemConfig& cfg, const BaselineConfig& bl);

/// argmax_p (W_H - Q)^+ B_W log2(1 + g p) - kappa p.
double baseline2_power(double g, double qk, const SystemConfig& cfg, const BaselineConfig& bl);

/// BS-RS channel, 10^{gain_db/20} times an i.i.d. CN(0,1) M x M matrix.
ComplexMatrix sample_relay_channel(Rng& rng, int m, double gain_db);

struct DfSlot {
  std::vector<int> selected;
  std::vector<double> rate;   // bits/s per user, 0 if unselected
  std::vector<double> power;  // slot-average power per user
  std::vector<double> gain;   // min of the two phase gains, 0 if unselected
};

/// Effective per-user gains of the two-phase decode-and-forward scheme for the
/// given selection: receive ZF on the BS-RS link, then joint BS+RS ZF.
std::vector<double> df_phase_gains(const ChannelState& h, const ComplexMatrix& h_br,
                                   const std::vector<int>& selected);

/// Rate of a user served with power p on both half-slot phases.
double df_rate(double g_eff, double p, double bw);

/// Power maximising w * df_rate(g, p) - kappa p by a bounded line search.
double df_power(double g_eff, double weight, const SystemConfig& cfg, const BaselineConfig& bl);

/// M random users served by equal-time half-duplex decode-and-forward.
DfSlot baseline3_df_step(const ChannelState& h, const ComplexMatrix& h_br,
                         std::span<const double> queues, const SystemConfig& cfg,
                         const BaselineConfig& bl, Rng& rng);

}  // namespace cocache
