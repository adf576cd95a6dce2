#pragma once

#include <string>
#include <vector>

namespace cqrl {

// Reads run directories (each holding seed_*/ subdirectories with
// train_curve.csv, trace.csv and config.json), groups seeds by algorithm and
// writes per-algorithm training-curve CSVs with across-seed mean and min/max
// band columns plus behavior CSVs of (episode, step, s, l, v) dots. Missing
// or partial inputs are skipped with a warning line in the output manifest.
// Returns the manifest text.
std::string emit_plot_data(const std::vector<std::string>& run_dirs, const std::string& out_dir);

}  // namespace cqrl
