#include "cqrl/replay.hpp"

namespace cqrl {

void ReplayBuffer::push(Transition t) {
  if (size() < capacity_) {
    items_.push_back(std::move(t));
  } else {
    items_[cursor_] = std::move(t);
  }
  cursor_ = (cursor_ + 1) % capacity_;
}

std::vector<int> ReplayBuffer::sample_indices(int k, Rng& rng) const {
  if (size() == 0) throw Error("replay: sampling from an empty buffer");
  if (k > size()) throw Error("replay: batch larger than buffer");
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = rng.uniform_int(size());
  return idx;
}

}  // namespace cqrl
