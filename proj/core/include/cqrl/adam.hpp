#pragma once

#include "cqrl/graph.hpp"

namespace cqrl {

struct AdamConfig {
  float lr = 3e-4f;
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float eps = 1e-8f;
};

// First/second moment accumulators for one ParameterStore.
class AdamState {
 public:
  AdamState(const ParameterStore& store, AdamConfig cfg);

  // One bias-corrected update from store gradients. Any non-finite gradient
  // raises and leaves parameters and state untouched. Gradients equal to zero
  // from a fresh state leave parameters unchanged.
  void step(ParameterStore& store);

  long step_count() const { return step_count_; }
  const AdamConfig& config() const { return cfg_; }

  std::vector<Array>& m() { return m_; }
  std::vector<Array>& v() { return v_; }
  void set_step_count(long t) { step_count_ = t; }

 private:
  AdamConfig cfg_;
  std::vector<Array> m_, v_;
  long step_count_ = 0;
};

}  // namespace cqrl
