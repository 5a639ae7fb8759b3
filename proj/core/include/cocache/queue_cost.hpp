#pragma once

#include <string>
#include <vector>

namespace cocache {

// Scalar system parameters. Queues and file sizes are in bits, rates in bits/s.
struct SystemConfig {
  double bw = 1e6;          // bandwidth B_W (Hz)
  double tau = 5e-3;        // slot duration (s)
  double alpha = 7.5e-5;    // cost smoothing (1/bits)
  double w_low = 2e4;       // playback threshold W_L (bits)
  double w_high = 2.5e5;    // buffer target W_H (bits)
  double mu0 = 2e6;         // streaming rate (bits/s)
  int m = 2;                // antennas at the BS and at the RS
  int n_files = 6;          // L
  std::vector<double> file_sizes = std::vector<double>(6, 4.8e9);
  std::vector<double> beta = std::vector<double>(4, 15.0);   // per user
  std::vector<double> gamma = std::vector<double>(4, 15.0);  // per user
  double eta = 1.25e-9;                                      // cache price (1/bits)
  double segment_bits = 1e7;                                 // L_S
  long urp_hold_slots = 10000;
  std::vector<double> popularity = {0.6, 0.3, 0.08, 0.01, 0.005, 0.005};

  int n_users() const { return 2 * m; }
  // Uniform prices for every user.
  void set_prices(double beta_all, double gamma_all);
};

/// Playback (departure) rate: linear ramp below W_L, mu0 above.
double playback_rate(double qk, const SystemConfig& cfg);

/// One-slot fluid update of a playback buffer.
double step_queue(double qk, double rate, const SystemConfig& cfg);

/// Smoothed interruption and overflow price,
/// beta e^{-alpha (Q - W_L)^+} + gamma e^{-alpha (W_H - Q)^+}.
double stage_cost(double qk, const SystemConfig& cfg, int k);

/// Minimiser of stage_cost; throws AssumptionError if the price ratio puts it
/// outside (W_L, W_H).
double q_circ(const SystemConfig& cfg, int k);

/// Water level lambda_0 > 0 solving (B_W / (2 ln 2)) E1(1/lambda) = mu0.
double lambda0(const SystemConfig& cfg);

/// Lower bound on beta_k below which serving user k is never worthwhile.
double beta_lower_bound(const SystemConfig& cfg, int k);

/// Human-readable list of violated parameter conditions (empty when valid).
std::vector<std::string> validate_assumptions(const SystemConfig& cfg);

}  // namespace cocache
