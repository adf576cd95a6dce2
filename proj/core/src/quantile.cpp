#include "cqrl/quantile.hpp"

#include <cmath>

namespace cqrl {

std::vector<double> quantile_midpoints(int n) {
  if (n < 1) throw Error("quantile_midpoints: N must be >= 1");
  std::vector<double> taus(n);
  for (int j = 1; j <= n; ++j) taus[j - 1] = (2.0 * j - 1.0) / (2.0 * n);
  return taus;
}

double aggregate(std::span<const double> values, AggregationMode mode) {
  if (values.empty()) throw Error("aggregate: empty distribution");
  if (mode == AggregationMode::kConservative) return values[0];
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc / static_cast<double>(values.size());
}

float aggregate(std::span<const float> values, AggregationMode mode) {
  if (values.empty()) throw Error("aggregate: empty distribution");
  if (mode == AggregationMode::kConservative) return values[0];
  double acc = 0.0;
  for (float v : values) acc += v;
  return static_cast<float>(acc / static_cast<double>(values.size()));
}

QuantileHuberResult quantile_huber_loss(std::span<const float> predicted,
                                        std::span<const float> levels,
                                        std::span<const float> targets, float kappa) {
  if (kappa <= 0.0f) throw Error("quantile_huber_loss: kappa must be positive");
  if (targets.empty()) throw Error("quantile_huber_loss: no target samples");
  if (predicted.size() != levels.size())
    throw Error("quantile_huber_loss: predicted/levels size mismatch");
  for (float q : predicted)
    if (!std::isfinite(q)) throw Error("quantile_huber_loss: non-finite prediction");
  for (float t : targets)
    if (!std::isfinite(t)) throw Error("quantile_huber_loss: non-finite target");

  QuantileHuberResult res;
  res.grad.assign(predicted.size(), 0.0f);
  const double inv = 1.0 / (static_cast<double>(predicted.size()) * targets.size());
  double loss = 0.0;
  for (size_t j = 0; j < predicted.size(); ++j) {
    const float tau = levels[j];
    double gj = 0.0;
    for (float t : targets) {
      const float u = t - predicted[j];
      const float w = u < 0.0f ? (1.0f - tau) : tau;
      const float au = std::fabs(u);
      const float huber = au <= kappa ? 0.5f * u * u : kappa * (au - 0.5f * kappa);
      loss += w * huber / kappa;
      // d/dq of w*Huber(u)/kappa with u = t - q
      const float dhuber = au <= kappa ? u / kappa : (u > 0.0f ? 1.0f : -1.0f);
      gj -= w * dhuber;
    }
    res.grad[j] = static_cast<float>(gj * inv);
  }
  res.loss = static_cast<float>(loss * inv);
  return res;
}

}  // namespace cqrl
