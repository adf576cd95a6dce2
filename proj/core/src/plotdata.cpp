#include "cqrl/plotdata.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <sstream>

#include <json.hpp>

#include "cqrl/metrics.hpp"
#include "cqrl/train_loop.hpp"

namespace cqrl {

namespace fs = std::filesystem;

namespace {

struct CurveSeries {
  std::vector<long> steps;
  std::vector<double> episode_return;  // NaN where the bucket had no episodes
};

bool parse_curve(const std::string& text, CurveSeries* out) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line.rfind("step,", 0) != 0) return false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    // columns: step,mean_reward,mean_episode_return,...
    const size_t c1 = line.find(',');
    const size_t c2 = line.find(',', c1 + 1);
    const size_t c3 = line.find(',', c2 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos || c3 == std::string::npos)
      return false;
    out->steps.push_back(std::stol(line.substr(0, c1)));
    const std::string ret = line.substr(c2 + 1, c3 - c2 - 1);
    out->episode_return.push_back(ret.empty() ? std::numeric_limits<double>::quiet_NaN()
                                              : std::stod(ret));
  }
  return !out->steps.empty();
}

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

std::string emit_plot_data(const std::vector<std::string>& run_dirs, const std::string& out_dir) {
  fs::create_directories(out_dir);
  std::ostringstream manifest;
  std::map<std::string, std::vector<CurveSeries>> curves_by_algo;
  std::map<std::string, std::vector<std::vector<TraceRow>>> traces_by_algo;

  std::vector<std::string> seed_dirs;
  for (const auto& run : run_dirs) {
    if (!fs::exists(run)) {
      manifest << "warning: missing run dir " << run << "\n";
      continue;
    }
    bool any_seed = false;
    for (const auto& entry : fs::directory_iterator(run)) {
      if (entry.is_directory() && entry.path().filename().string().rfind("seed_", 0) == 0) {
        seed_dirs.push_back(entry.path().string());
        any_seed = true;
      }
    }
    // a run dir may itself be a seed dir
    if (!any_seed && fs::exists(fs::path(run) / "config.json"))
      seed_dirs.push_back(run);
    else if (!any_seed)
      manifest << "warning: no seed directories under " << run << "\n";
  }
  std::sort(seed_dirs.begin(), seed_dirs.end());

  for (const auto& dir : seed_dirs) {
    std::string algo;
    try {
      const auto j = nlohmann::json::parse(read_text_file(dir + "/config.json"));
      algo = j.at("agent").get<std::string>();
    } catch (const std::exception&) {
      manifest << "warning: skipping " << dir << " (unreadable config.json)\n";
      continue;
    }
    CurveSeries series;
    try {
      if (!parse_curve(read_text_file(dir + "/train_curve.csv"), &series))
        throw Error("bad curve");
      curves_by_algo[algo].push_back(std::move(series));
    } catch (const std::exception&) {
      manifest << "warning: skipping curve of " << dir << " (missing or bad train_curve.csv)\n";
    }
    try {
      traces_by_algo[algo].push_back(parse_trace_csv(read_text_file(dir + "/trace.csv")));
    } catch (const std::exception&) {
      manifest << "warning: skipping behavior of " << dir << " (missing or bad trace.csv)\n";
    }
  }

  for (const auto& [algo, series] : curves_by_algo) {
    // align buckets by the shortest series
    size_t n = series.front().steps.size();
    for (const auto& s : series) n = std::min(n, s.steps.size());
    std::ostringstream os;
    os << "step,mean,min,max,seeds\n";
    for (size_t i = 0; i < n; ++i) {
      double acc = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
      int count = 0;
      for (const auto& s : series) {
        const double v = s.episode_return[i];
        if (std::isnan(v)) continue;
        acc += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        ++count;
      }
      if (count == 0) continue;
      os << series.front().steps[i] << "," << fmt9(acc / count) << "," << fmt9(lo) << ","
         << fmt9(hi) << "," << count << "\n";
    }
    write_text_file(out_dir + "/curves_" + algo + ".csv", os.str());
    manifest << "curves_" << algo << ".csv: " << series.size() << " seed series\n";
  }

  for (const auto& [algo, traces] : traces_by_algo) {
    std::ostringstream os;
    os << "episode,step,s,l,v\n";
    int offset = 0;
    for (const auto& trace : traces) {
      int max_ep = -1;
      for (const auto& r : trace) {
        max_ep = std::max(max_ep, r.episode);
        os << (r.episode + offset) << "," << r.step << "," << fmt9(r.s) << "," << fmt9(r.l)
           << "," << fmt9(r.v) << "\n";
      }
      offset += max_ep + 1;
    }
    write_text_file(out_dir + "/behavior_" + algo + ".csv", os.str());
    manifest << "behavior_" << algo << ".csv: " << traces.size() << " seed traces\n";
  }

  write_text_file(out_dir + "/manifest.txt", manifest.str());
  return manifest.str();
}

}  // namespace cqrl
