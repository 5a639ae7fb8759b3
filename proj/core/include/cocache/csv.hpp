#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "cocache/cache_control.hpp"
#include "cocache/sim_engine.hpp"

namespace cocache {

inline constexpr const char* kCsvSchemaVersion = "1";

/// 12 significant digits, the format used for every number in the CSV outputs.
std::string format_number(double v);

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
void write_sweep_summary_csv(std::ostream& os, Policy policy,
                             const std::vector<SweepAggregate>& aggregates);

/// One row per user of a single episode.
void write_user_metrics_csv(std::ostream& os, const MetricsRecord& m);
void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace);
void write_trajectory_csv(std::ostream& os, const std::vector<TracePoint>& trace);

}  // namespace cocache
