#pragma once

#include <string>
#include <vector>

#include "cqrl/targets.hpp"

namespace cqrl {

// One decision step of an evaluation episode. Values are float32 on purpose:
// they round-trip through the trace CSV losslessly (%.9g), so metrics
// recomputed from a stored trace match the original bytes.
struct TraceRow {
  int episode = 0;
  int step = 0;
  float s = 0.0f;
  float l = 0.0f;
  float v = 0.0f;
  float a = 0.0f;
  float reward = 0.0f;
  int collision = 0;
  float occluder_clearance = 0.0f;
};

struct MetricsRow {
  double mean_return = 0.0;
  double collision_rate_pct = 0.0;
  double mean_speed = 0.0;
  double accel_p05 = 0.0;
  long episodes = 0;
};

// Linear interpolation between order statistics.
double percentile(std::vector<double> values, double q);

// Aggregates completed episodes: mean episode return, 100 * collisions /
// episodes, mean per-step speed, 5th-percentile per-step acceleration.
MetricsRow compute_metrics(const std::vector<TraceRow>& trace);

std::string metrics_csv(const std::vector<std::pair<std::string, MetricsRow>>& rows);
std::string trace_csv(const std::vector<TraceRow>& trace);
std::vector<TraceRow> parse_trace_csv(const std::string& text);

}  // namespace cqrl
