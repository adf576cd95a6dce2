#include "cqrl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace cqrl {

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw Error("percentile: empty");
  std::sort(values.begin(), values.end());
  const double rank = q * (static_cast<double>(values.size()) - 1.0);
  const size_t lo = static_cast<size_t>(std::floor(rank));
  const size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

MetricsRow compute_metrics(const std::vector<TraceRow>& trace) {
  if (trace.empty()) throw Error("compute_metrics: no completed episodes");
  std::map<int, double> returns;
  std::map<int, bool> collided;
  std::vector<double> speeds, accels;
  for (const auto& row : trace) {
    returns[row.episode] += row.reward;
    collided[row.episode] = collided[row.episode] || row.collision != 0;
    speeds.push_back(row.v);
    accels.push_back(row.a);
  }
  MetricsRow m;
  m.episodes = static_cast<long>(returns.size());
  double ret_acc = 0.0;
  long collisions = 0;
  for (const auto& [ep, ret] : returns) {
    ret_acc += ret;
    collisions += collided[ep] ? 1 : 0;
  }
  m.mean_return = ret_acc / static_cast<double>(m.episodes);
  m.collision_rate_pct = 100.0 * static_cast<double>(collisions) / static_cast<double>(m.episodes);
  double v_acc = 0.0;
  for (double v : speeds) v_acc += v;
  m.mean_speed = v_acc / static_cast<double>(speeds.size());
  m.accel_p05 = percentile(accels, 0.05);
  return m;
}

namespace {
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}
std::string fmtf(float v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(v));
  return buf;
}
}  // namespace

std::string metrics_csv(const std::vector<std::pair<std::string, MetricsRow>>& rows) {
  std::ostringstream os;
  os << "label,mean_return,collision_rate_pct,mean_speed,accel_p05,episodes\n";
  for (const auto& [label, m] : rows)
    os << label << "," << fmt(m.mean_return) << "," << fmt(m.collision_rate_pct) << ","
       << fmt(m.mean_speed) << "," << fmt(m.accel_p05) << "," << m.episodes << "\n";
  return os.str();
}

std::string trace_csv(const std::vector<TraceRow>& trace) {
  std::ostringstream os;
  os << "episode,step,s,l,v,a,reward,collision,occluder_clearance\n";
  for (const auto& r : trace)
    os << r.episode << "," << r.step << "," << fmtf(r.s) << "," << fmtf(r.l) << "," << fmtf(r.v)
       << "," << fmtf(r.a) << "," << fmtf(r.reward) << "," << r.collision << ","
       << fmtf(r.occluder_clearance) << "\n";
  return os.str();
}

std::vector<TraceRow> parse_trace_csv(const std::string& text) {
  std::vector<TraceRow> rows;
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw Error("trace csv: empty");
  if (line.rfind("episode,step,", 0) != 0) throw Error("trace csv: bad header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    TraceRow r;
    double s, l, v, a, reward, clearance;
    if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf,%lf,%lf,%lf,%d,%lf", &r.episode, &r.step, &s,
                    &l, &v, &a, &reward, &r.collision, &clearance) != 9)
      throw Error("trace csv: bad row '" + line + "'");
    r.s = static_cast<float>(s);
    r.l = static_cast<float>(l);
    r.v = static_cast<float>(v);
    r.a = static_cast<float>(a);
    r.reward = static_cast<float>(reward);
    r.occluder_clearance = static_cast<float>(clearance);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace cqrl
