#pragma once

#include <span>
#include <vector>

#include "cqrl/common.hpp"

namespace cqrl {

enum class AggregationMode { kMean, kConservative };
enum class EvaluationVariant { kPolicy, kTrajectory };

// Quantile midpoints tau_j = (2j-1)/(2N), j = 1..N.
std::vector<double> quantile_midpoints(int n);

// Return distribution approximated by N quantile values at the midpoint
// levels. Values are in return units and are not required to be sorted when
// they come out of a network head.
struct QuantileDist {
  std::vector<double> values;
  std::vector<double> levels;

  explicit QuantileDist(int n) : values(n, 0.0), levels(quantile_midpoints(n)) {
    if (n < 1) throw Error("QuantileDist: N must be >= 1");
  }
  explicit QuantileDist(std::vector<double> v) : values(std::move(v)) {
    if (values.empty()) throw Error("QuantileDist: empty");
    levels = quantile_midpoints(static_cast<int>(values.size()));
  }
  int n() const { return static_cast<int>(values.size()); }
};

// Scalar Q-value of a distribution: mean of the values, or the first value
// (the tau_1 = 1/(2N) quantile, the approximate lower bound of returns).
double aggregate(std::span<const double> values, AggregationMode mode);
float aggregate(std::span<const float> values, AggregationMode mode);
inline double aggregate(const QuantileDist& d, AggregationMode mode) {
  return aggregate(std::span<const double>(d.values), mode);
}

struct QuantileHuberResult {
  float loss = 0.0f;
  std::vector<float> grad;  // dl/dq_j, same length as predicted
};

// loss = mean over (j, k) of |tau_j - 1[u<0]| * Huber_kappa(u) / kappa with
// u = target_k - q_j. Gradients are with respect to the predicted quantiles.
QuantileHuberResult quantile_huber_loss(std::span<const float> predicted,
                                        std::span<const float> levels,
                                        std::span<const float> targets, float kappa = 1.0f);

}  // namespace cqrl
