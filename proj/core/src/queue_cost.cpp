#include "cocache/queue_cost.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cocache/error.hpp"
#include "cocache/special_math.hpp"

namespace cocache {

void SystemConfig::set_prices(double beta_all, double gamma_all) {
  beta.assign(n_users(), beta_all);
  gamma.assign(n_users(), gamma_all);
}

double playback_rate(double qk, const SystemConfig& cfg) {
  if (qk < cfg.w_low) return qk * cfg.mu0 / cfg.w_low;
  return cfg.mu0;
}

double step_queue(double qk, double rate, const SystemConfig& cfg) {
  return qk + (rate - playback_rate(qk, cfg)) * cfg.tau;
}

double stage_cost(double qk, const SystemConfig& cfg, int k) {
  const double below = std::max(qk - cfg.w_low, 0.0);
  const double above = std::max(cfg.w_high - qk, 0.0);
  return cfg.beta[k] * std::exp(-cfg.alpha * below) + cfg.gamma[k] * std::exp(-cfg.alpha * above);
}

double q_circ(const SystemConfig& cfg, int k) {
  const double log_ratio = std::log(cfg.beta[k]) - std::log(cfg.gamma[k]);
  const double span = cfg.alpha * (cfg.w_high - cfg.w_low);
  if (!(std::abs(log_ratio) < span)) {
    std::ostringstream os;
    os << "q_circ: beta/gamma of user " << k << " puts the cost minimiser outside (W_L, W_H)";
    throw AssumptionError(os.str());
  }
  return log_ratio / (2.0 * cfg.alpha) + 0.5 * (cfg.w_low + cfg.w_high);
}

double lambda0(const SystemConfig& cfg) {
  // (B/(2 ln2)) E1(1/lambda) = mu0  <=>  E1(1/lambda) = 2 mu0 ln2 / B.
  return 1.0 / inverse_e1(2.0 * cfg.mu0 * kLn2 / cfg.bw);
}

double beta_lower_bound(const SystemConfig& cfg, int k) {
  const double half_gap = std::exp(-0.5 * (cfg.w_high - cfg.w_low) * cfg.alpha);
  const double power = 0.5 * water_filling_mean_power(lambda0(cfg));
  return (power + cfg.gamma[k] * half_gap) / (1.0 - half_gap);
}

std::vector<std::string> validate_assumptions(const SystemConfig& cfg) {
  std::vector<std::string> out;
  auto fail = [&out](const std::string& s) { out.push_back(s); };

  if (!(cfg.bw > 0)) fail("bw must be positive");
  if (!(cfg.tau > 0)) fail("tau must be positive");
  if (!(cfg.alpha > 0)) fail("alpha must be positive");
  if (!(cfg.mu0 > 0)) fail("mu0 must be positive");
  if (!(cfg.w_low > 0)) fail("w_low must be positive");
  if (!(cfg.w_high > cfg.w_low)) fail("w_high must exceed w_low");
  if (cfg.m < 1) fail("m must be >= 1");
  if (!out.empty()) return out;

  if (!(cfg.w_low > cfg.mu0 * cfg.tau)) {
    std::ostringstream os;
    os << "slot size: W_L = " << cfg.w_low << " must exceed mu0*tau = " << cfg.mu0 * cfg.tau;
    fail(os.str());
  }
  if (static_cast<int>(cfg.beta.size()) != cfg.n_users() ||
      static_cast<int>(cfg.gamma.size()) != cfg.n_users()) {
    fail("beta and gamma need one entry per user (2M)");
    return out;
  }

  double lam0 = 0.0;
  try {
    lam0 = lambda0(cfg);
  } catch (const Error& e) {
    fail(std::string("lambda_0 root not found (mu0/bw inconsistent): ") + e.what());
  }

  const double span = cfg.alpha * (cfg.w_high - cfg.w_low);
  for (int k = 0; k < cfg.n_users(); ++k) {
    if (!(cfg.beta[k] > 0) || !(cfg.gamma[k] > 0)) {
      std::ostringstream os;
      os << "prices of user " << k << " must be positive";
      fail(os.str());
      continue;
    }
    const double ratio = cfg.beta[k] / cfg.gamma[k];
    if (!(ratio > std::exp(-span) && ratio < std::exp(span))) {
      std::ostringstream os;
      os << "price ratio: beta/gamma = " << ratio << " for user " << k << " outside ("
         << std::exp(-span) << ", " << std::exp(span) << ")";
      fail(os.str());
    }
    if (lam0 > 0.0) {
      const double bound = beta_lower_bound(cfg, k);
      if (!(cfg.beta[k] > bound)) {
        std::ostringstream os;
        os << "interruption price: beta = " << cfg.beta[k] << " for user " << k
           << " must exceed " << bound;
        fail(os.str());
      }
    }
  }
  return out;
}

}  // namespace cocache
