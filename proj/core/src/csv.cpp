#include "cocache/csv.hpp"

#include <cstdio>

namespace cocache {
namespace {

void header(std::ostream& os, const char* kind) {
  os << "# cocache " << kind << " schema v" << kCsvSchemaVersion << '\n';
}

template <typename... Cols>
void line(std::ostream& os, const Cols&... cols) {
  bool first = true;
  ((os << (first ? "" : ",") << cols, first = false), ...);
  os << '\n';
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  header(os, "sweep");
  os << "policy,beta,gamma,eta_or_kappa,avg_power_per_user,interruption_prob,overflow_prob,"
        "combined_cost,pr_comp,occupancy_bits,seed,n_slots\n";
  for (const SweepRow& r : rows) {
    if (!r.error.empty()) continue;
    const MetricsRecord& m = r.metrics;
    line(os, policy_name(r.policy), format_number(r.beta), format_number(r.gamma),
         format_number(r.knob), format_number(m.avg_power_per_user()),
         format_number(m.mean_interruption()), format_number(m.mean_overflow()),
         format_number(m.combined_cost), format_number(m.pr_comp),
         format_number(m.occupancy_bits), r.seed, r.n_slots);
  }
}

void write_sweep_summary_csv(std::ostream& os, Policy policy,
                             const std::vector<SweepAggregate>& aggregates) {
  header(os, "sweep-summary");
  os << "policy,beta,gamma,eta_or_kappa,n_seeds,avg_power_per_user,avg_power_se,"
        "interruption_prob,interruption_se,overflow_prob,overflow_se,combined_cost,"
        "combined_cost_se,pr_comp,occupancy_bits\n";
  for (const SweepAggregate& a : aggregates) {
    line(os, policy_name(policy), format_number(a.beta), format_number(a.beta),
         format_number(a.knob), a.n_ok, format_number(a.power_mean), format_number(a.power_se),
         format_number(a.interruption_mean), format_number(a.interruption_se),
         format_number(a.overflow_mean), format_number(a.overflow_se),
         format_number(a.cost_mean), format_number(a.cost_se), format_number(a.pr_comp_mean),
         format_number(a.occupancy_mean));
  }
}

void write_user_metrics_csv(std::ostream& os, const MetricsRecord& m) {
  header(os, "episode");
  os << "user,interruption_prob,overflow_prob,smooth_interruption,smooth_overflow,avg_power,"
        "median_queue,served_bits_given_comp,served_bits_given_selected\n";
  for (std::size_t k = 0; k < m.interruption.size(); ++k) {
    line(os, k + 1, format_number(m.interruption[k]), format_number(m.overflow[k]),
         format_number(m.smooth_interruption[k]), format_number(m.smooth_overflow[k]),
         format_number(m.avg_power[k]), format_number(m.median_queue[k]),
         format_number(m.served_given_comp[k]), format_number(m.served_given_selected[k]));
  }
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace) {
  header(os, "trace");
  const std::size_t n = trace.empty() ? 0 : trace.front().queue.size();
  os << "slot,s,q_min";
  for (const char* col : {"Q", "g", "p", "rate"}) {
    for (std::size_t k = 0; k < n; ++k) os << ',' << col << '_' << k + 1;
  }
  os << '\n';
  for (const TraceRow& r : trace) {
    os << r.slot << ',' << r.s << ',' << format_number(r.q_min);
    for (const auto* v : {&r.queue, &r.gain, &r.power, &r.rate}) {
      for (double x : *v) os << ',' << format_number(x);
    }
    os << '\n';
  }
}

void write_trajectory_csv(std::ostream& os, const std::vector<TracePoint>& trace) {
  header(os, "cache-opt");
  const std::size_t n = trace.empty() ? 0 : trace.front().q.size();
  os << "iter,U_window_avg,occupancy_bits";
  for (std::size_t l = 0; l < n; ++l) os << ",q_" << l + 1;
  os << '\n';
  for (const TracePoint& t : trace) {
    os << t.iter << ',' << format_number(t.u_window_avg) << ',' << format_number(t.occupancy_bits);
    for (double q : t.q) os << ',' << format_number(q);
    os << '\n';
  }
}

}  // namespace cocache
