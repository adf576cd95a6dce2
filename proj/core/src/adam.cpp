#include "cqrl/adam.hpp"

#include <cmath>

namespace cqrl {

AdamState::AdamState(const ParameterStore& store, AdamConfig cfg) : cfg_(cfg) {
  for (int i = 0; i < store.size(); ++i) {
    m_.emplace_back(store.value(i).shape);
    v_.emplace_back(store.value(i).shape);
  }
}

void AdamState::step(ParameterStore& store) {
  if (store.size() != static_cast<int>(m_.size()))
    throw Error("adam: state does not match store layout");
  for (int i = 0; i < store.size(); ++i)
    if (!store.grad(i).all_finite())
      throw Error("adam: non-finite gradient in '" + store.name(i) + "'");

  ++step_count_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_count_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_count_));
  for (int i = 0; i < store.size(); ++i) {
    auto& p = store.value(i).data;
    const auto& g = store.grad(i).data;
    auto& m = m_[i].data;
    auto& v = v_[i].data;
    for (size_t k = 0; k < p.size(); ++k) {
      m[k] = cfg_.beta1 * m[k] + (1.0f - cfg_.beta1) * g[k];
      v[k] = cfg_.beta2 * v[k] + (1.0f - cfg_.beta2) * g[k] * g[k];
      const float mhat = static_cast<float>(m[k] / bc1);
      const float vhat = static_cast<float>(v[k] / bc2);
      p[k] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
  }
}

}  // namespace cqrl
