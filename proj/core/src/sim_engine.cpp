#include "cocache/sim_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <thread>

#include "cocache/error.hpp"
#include "cocache/power_control.hpp"

namespace cocache {
namespace {

// Stride of the queue samples kept for the median.
constexpr long kMedianStride = 16;

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void check_finite(double v, const char* what, long slot, int k) {
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "run_episode: non-finite " << what << " at slot " << slot << ", user " << k;
    throw NumericError(os.str());
  }
}

// PolicyTables per distinct q_min seen in an episode.
class TablesCache {
 public:
  explicit TablesCache(const SystemConfig& cfg) : cfg_(cfg) {}
  const PolicyTables& get(double qmin) {
    auto it = tables_.find(qmin);
    if (it == tables_.end()) {
      it = tables_.emplace(qmin, std::make_unique<PolicyTables>(cfg_, qmin)).first;
    }
    return *it->second;
  }
  long sign_crossings() const {
    long n = 0;
    for (const auto& [q, t] : tables_) n += t->sign_crossings();
    return n;
  }

 private:
  const SystemConfig& cfg_;
  std::map<double, std::unique_ptr<PolicyTables>> tables_;
};

}  // namespace

const char* policy_name(Policy p) {
  switch (p) {
    case Policy::proposed: return "proposed";
    case Policy::baseline1: return "baseline1";
    case Policy::baseline2: return "baseline2";
    case Policy::baseline3: return "baseline3";
    case Policy::zero_power: return "zero_power";
  }
  return "unknown";
}

Policy parse_policy(const std::string& name) {
  for (Policy p : {Policy::proposed, Policy::baseline1, Policy::baseline2, Policy::baseline3,
                   Policy::zero_power}) {
    if (name == policy_name(p)) return p;
  }
  throw ConfigError("unknown policy '" + name +
                    "' (expected proposed, baseline1, baseline2, baseline3 or zero_power)");
}

double MetricsRecord::mean_interruption() const { return mean_of(interruption); }
double MetricsRecord::mean_overflow() const { return mean_of(overflow); }
double MetricsRecord::avg_power_per_user() const { return mean_of(avg_power); }

EpisodeResult run_episode(const SystemConfig& cfg, const EpisodeSettings& st, Rng& rng) {
  const int n = cfg.n_users();
  if (st.n_slots < 1) throw DomainError("run_episode: n_slots must be >= 1");
  if (!(st.burn_in_fraction >= 0.0 && st.burn_in_fraction < 1.0)) {
    throw DomainError("run_episode: burn-in fraction must lie in [0, 1)");
  }
  if (st.q.size() != static_cast<std::size_t>(cfg.n_files) ||
      cfg.file_sizes.size() != static_cast<std::size_t>(cfg.n_files)) {
    throw DomainError("run_episode: cache vector, file sizes and n_files disagree");
  }
  if (st.policy != Policy::proposed && st.policy != Policy::zero_power) {
    validate_baseline(st.baseline);
  }
  if (cfg.urp_hold_slots < 1) throw DomainError("run_episode: urp_hold_slots must be >= 1");

  const long burn_in = static_cast<long>(st.burn_in_fraction * static_cast<double>(st.n_slots));
  const long measured = st.n_slots - burn_in;

  EpisodeResult out;
  MetricsRecord& m = out.metrics;
  m.n_slots = measured;
  m.interruption.assign(n, 0.0);
  m.overflow.assign(n, 0.0);
  m.smooth_interruption.assign(n, 0.0);
  m.smooth_overflow.assign(n, 0.0);
  m.avg_power.assign(n, 0.0);
  m.median_queue.assign(n, 0.0);
  m.served_given_comp.assign(n, 0.0);
  m.served_given_selected.assign(n, 0.0);
  m.occupancy_bits = occupancy_bits(st.q, cfg.file_sizes);
  m.min_queue = cfg.w_low;

  std::vector<double> queue(n, cfg.w_low);
  std::vector<double> power(n, 0.0);
  std::vector<double> rate(n, 0.0);
  std::vector<long> comp_slots(n, 0);
  std::vector<long> selected_slots(n, 0);
  std::vector<std::vector<double>> queue_samples(n);
  for (auto& v : queue_samples) v.reserve(static_cast<std::size_t>(measured / kMedianStride + 1));

  TablesCache tables(cfg);
  const PolicyTables* active = nullptr;
  ChannelState h;
  h.m = cfg.m;
  BeamformOutcome outcome;
  ComplexMatrix h_br;

  Urp urp;
  std::vector<SegmentLedger> ledgers(n);
  double qmin = 0.0;
  long comp_count = 0;
  double qmin_sum = 0.0;

  for (long t = 0; t < st.n_slots; ++t) {
    if (t % cfg.urp_hold_slots == 0) {
      const Urp next = st.fixed_urp ? *st.fixed_urp : sample_urp(rng, cfg.popularity, n);
      for (int k = 0; k < n; ++k) {
        const double qf = st.q[next.pi[k]];
        if (t == 0) {
          ledgers[k] = SegmentLedger::for_file(cfg.segment_bits, qf);
        } else if (next.pi[k] != urp.pi[k]) {
          ledgers[k].restart(qf);
        }
      }
      urp = next;
      qmin = q_min(st.q, urp);
      if (st.policy == Policy::proposed) active = &tables.get(qmin);
    }
    const bool measuring = t >= burn_in;

    int s = 0;
    if (st.policy == Policy::proposed) s = sample_cache_state(rng, st.q, urp);
    sample_channel_into(rng, h);

    std::fill(power.begin(), power.end(), 0.0);
    std::fill(rate.begin(), rate.end(), 0.0);
    const std::vector<double>* gains = nullptr;
    std::vector<double> df_gain;
    try {
      switch (st.policy) {
        case Policy::proposed:
          select_and_beamform_into(h, s, rng, outcome);
          policy_step_into(queue, outcome.gains, *active, power);
          gains = &outcome.gains;
          break;
        case Policy::baseline1:
        case Policy::baseline2:
          select_and_beamform_into(h, 0, rng, outcome);
          for (int k = 0; k < n; ++k) {
            const double g = outcome.gains[k];
            power[k] = st.policy == Policy::baseline1
                           ? baseline1_power(g, cfg, st.baseline)
                           : baseline2_power(g, queue[k], cfg, st.baseline);
          }
          gains = &outcome.gains;
          break;
        case Policy::baseline3: {
          h_br = sample_relay_channel(rng, cfg.m, st.baseline.relay_gain_db);
          DfSlot df = baseline3_df_step(h, h_br, queue, cfg, st.baseline, rng);
          power = df.power;
          rate = df.rate;
          df_gain = std::move(df.gain);
          gains = &df_gain;
          break;
        }
        case Policy::zero_power:
          select_and_beamform_into(h, 0, rng, outcome);
          gains = &outcome.gains;
          break;
      }
    } catch (const DegenerateChannelError&) {
      // Probability-zero event for continuous channels; the slot carries no data.
      ++m.degenerate_slots;
      df_gain.assign(n, 0.0);
      gains = &df_gain;
      std::fill(power.begin(), power.end(), 0.0);
      std::fill(rate.begin(), rate.end(), 0.0);
    }
    if (st.policy != Policy::baseline3) {
      for (int k = 0; k < n; ++k) {
        rate[k] = power[k] > 0.0 ? instantaneous_rate((*gains)[k], power[k], cfg.bw) : 0.0;
      }
    }

    if (st.record_trace) {
      out.trace.push_back({t, s, qmin, queue, *gains, power, rate});
    }

    if (measuring) {
      if (s == 1) ++comp_count;
      qmin_sum += qmin;
    }
    for (int k = 0; k < n; ++k) {
      check_finite(power[k], "power", t, k);
      check_finite(rate[k], "rate", t, k);
      m.min_power = std::min(m.min_power, power[k]);
      const double served = rate[k] * cfg.tau;
      if (measuring) {
        const double qk = queue[k];
        if (qk < cfg.w_low) m.interruption[k] += 1.0;
        if (qk > cfg.w_high) m.overflow[k] += 1.0;
        m.smooth_interruption[k] += std::exp(-cfg.alpha * std::max(qk - cfg.w_low, 0.0));
        m.smooth_overflow[k] += std::exp(-cfg.alpha * std::max(cfg.w_high - qk, 0.0));
        m.avg_power[k] += power[k];
        if ((t - burn_in) % kMedianStride == 0) queue_samples[k].push_back(qk);
        if (s == 1) {
          m.served_given_comp[k] += served;
          ++comp_slots[k];
        }
        if ((*gains)[k] > 0.0) {
          m.served_given_selected[k] += served;
          ++selected_slots[k];
        }
        if (st.policy == Policy::proposed) {
          const SegmentLedger before = ledgers[k];
          account_slot(ledgers[k], served, s);
          m.comp_transmissions += ledgers[k].comp_transmissions - before.comp_transmissions;
          m.underflow_events += ledgers[k].underflow_events - before.underflow_events;
          m.segments_completed += ledgers[k].segments_completed - before.segments_completed;
          m.segments_with_underflow +=
              ledgers[k].segments_with_underflow - before.segments_with_underflow;
        }
      } else if (st.policy == Policy::proposed) {
        account_slot(ledgers[k], served, s);
      }
      queue[k] = step_queue(queue[k], rate[k], cfg);
      check_finite(queue[k], "queue", t, k);
      m.min_queue = std::min(m.min_queue, queue[k]);
    }
  }

  const double inv = measured > 0 ? 1.0 / static_cast<double>(measured) : 0.0;
  for (int k = 0; k < n; ++k) {
    m.interruption[k] *= inv;
    m.overflow[k] *= inv;
    m.smooth_interruption[k] *= inv;
    m.smooth_overflow[k] *= inv;
    m.avg_power[k] *= inv;
    m.total_power += m.avg_power[k];
    m.combined_cost += cfg.beta[k] * m.interruption[k] + cfg.gamma[k] * m.overflow[k];
    if (comp_slots[k] > 0) m.served_given_comp[k] /= static_cast<double>(comp_slots[k]);
    if (selected_slots[k] > 0) {
      m.served_given_selected[k] /= static_cast<double>(selected_slots[k]);
    }
    auto& qs = queue_samples[k];
    if (!qs.empty()) {
      auto mid = qs.begin() + static_cast<std::ptrdiff_t>(qs.size() / 2);
      std::nth_element(qs.begin(), mid, qs.end());
      m.median_queue[k] = *mid;
    }
  }
  m.combined_cost += m.total_power;
  m.pr_comp = static_cast<double>(comp_count) * inv;
  m.mean_q_min = qmin_sum * inv;
  m.underflow_frequency = m.comp_transmissions > 0
                              ? static_cast<double>(m.underflow_events) /
                                    static_cast<double>(m.comp_transmissions)
                              : 0.0;
  m.sign_crossings = tables.sign_crossings();
  return out;
}

void validate_grid(const SweepGrid& grid) {
  if (grid.points.empty()) throw ConfigError("sweep grid has no points");
  if (grid.seeds.empty()) throw ConfigError("sweep grid has no seeds");
  std::vector<std::uint64_t> s = grid.seeds;
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end()) {
    throw ConfigError("sweep seeds must be distinct");
  }
  if (grid.n_slots < 1) throw ConfigError("sweep n_slots must be >= 1");
}

CacheVector optimised_cache(const SystemConfig& cfg, long iters, std::uint64_t seed) {
  Rng rng(seed ^ 0x9E3779B97F4A7C15ULL);
  return run_cache_optimization(cfg, iters, rng).q;
}

SweepResult sweep(const SweepGrid& grid, const SystemConfig& cfg) {
  validate_grid(grid);
  const std::size_t n_points = grid.points.size();
  const std::size_t n_seeds = grid.seeds.size();
  SweepResult res;
  res.rows.resize(n_points * n_seeds);

  auto run_task = [&](std::size_t task) {
    const std::size_t pi = task / n_seeds;
    const std::size_t si = task % n_seeds;
    const SweepPoint& pt = grid.points[pi];
    SweepRow& row = res.rows[task];
    row.policy = grid.policy;
    row.point = pi;
    row.beta = pt.beta;
    row.gamma = pt.beta;
    row.knob = pt.knob;
    row.seed = grid.seeds[si];
    row.n_slots = grid.n_slots;
    try {
      SystemConfig c = cfg;
      c.set_prices(pt.beta, pt.beta);
      EpisodeSettings es;
      es.policy = grid.policy;
      es.n_slots = grid.n_slots;
      es.burn_in_fraction = grid.burn_in_fraction;
      es.baseline.relay_gain_db = grid.relay_gain_db;
      if (grid.policy == Policy::proposed) {
        c.eta = pt.knob;
        es.q = optimised_cache(c, grid.cache_opt_iters, row.seed);
      } else {
        es.q = CacheVector::uniform(c.n_files, 0.0);
        es.baseline.kappa = pt.knob;
        es.baseline.id = grid.policy == Policy::baseline1   ? 1
                         : grid.policy == Policy::baseline2 ? 2
                                                            : 3;
      }
      row.q.assign(es.q.values().begin(), es.q.values().end());
      Rng rng(row.seed);
      row.metrics = run_episode(c, es, rng).metrics;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  };

  const std::size_t n_tasks = res.rows.size();
  unsigned n_threads = grid.threads > 0 ? static_cast<unsigned>(grid.threads)
                                        : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, n_tasks));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n_tasks; i = next++) run_task(i);
  };
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (std::size_t pi = 0; pi < n_points; ++pi) {
    SweepAggregate a;
    a.point = pi;
    a.beta = grid.points[pi].beta;
    a.knob = grid.points[pi].knob;
    std::vector<double> pw, in, ov, co;
    for (std::size_t si = 0; si < n_seeds; ++si) {
      const SweepRow& r = res.rows[pi * n_seeds + si];
      if (!r.error.empty()) continue;
      pw.push_back(r.metrics.avg_power_per_user());
      in.push_back(r.metrics.mean_interruption());
      ov.push_back(r.metrics.mean_overflow());
      co.push_back(r.metrics.combined_cost);
      a.pr_comp_mean += r.metrics.pr_comp;
      a.occupancy_mean += r.metrics.occupancy_bits;
    }
    a.n_ok = static_cast<int>(pw.size());
    auto stats = [](const std::vector<double>& v, double& mean, double& se) {
      mean = mean_of(v);
      se = 0.0;
      if (v.size() < 2) return;
      double ss = 0.0;
      for (double x : v) ss += (x - mean) * (x - mean);
      se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
    };
    stats(pw, a.power_mean, a.power_se);
    stats(in, a.interruption_mean, a.interruption_se);
    stats(ov, a.overflow_mean, a.overflow_se);
    stats(co, a.cost_mean, a.cost_se);
    if (a.n_ok > 0) {
      a.pr_comp_mean /= a.n_ok;
      a.occupancy_mean /= a.n_ok;
    }
    res.aggregates.push_back(a);
  }
  return res;
}

}  // namespace cocache
