#pragma once

#include <cmath>
#include <cstdlib>
#include <new>
#include <numeric>
#include <string>
#include <vector>

#include "cqrl/common.hpp"

namespace cqrl {

// 64-byte-aligned allocator. Keeps every tensor buffer on the same alignment
// so vectorized kernels take identical code paths (and produce identical
// rounding) no matter what the heap looked like when the buffer was made.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlign{64};

  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) {}

  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), kAlign));
  }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, kAlign); }

  template <typename U>
  bool operator==(const AlignedAllocator<U>&) const {
    return true;
  }
};

using FloatVec = std::vector<float, AlignedAllocator<float>>;

// Dense row-major float32 array. The only tensor type in the project.
struct Array {
  std::vector<int> shape;
  FloatVec data;

  Array() = default;
  explicit Array(std::vector<int> s, float fill = 0.0f) : shape(std::move(s)) {
    data.assign(numel_of(shape), fill);
  }
  Array(std::vector<int> s, std::vector<float> d) : shape(std::move(s)) {
    data.assign(d.begin(), d.end());
    if (static_cast<size_t>(numel_of(shape)) != data.size())
      throw Error("Array: data length does not match shape");
  }

  static long numel_of(const std::vector<int>& s) {
    long n = 1;
    for (int d : s) {
      if (d <= 0) throw Error("Array: non-positive dimension");
      n *= d;
    }
    return n;
  }

  long numel() const { return static_cast<long>(data.size()); }

  bool same_shape(const Array& o) const { return shape == o.shape; }

  bool all_finite() const {
    for (float v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }

  void fill(float v) { std::fill(data.begin(), data.end(), v); }

  std::string shape_str() const {
    std::string s = "[";
    for (size_t i = 0; i < shape.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(shape[i]);
    }
    return s + "]";
  }
};

}  // namespace cqrl
