#pragma once

#include <cstdint>
#include <string>

namespace cqrl {

inline const char* kVersion = "0.1.0";

inline uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(uint64_t v);

// Content hash identifying the code version in run metadata.
inline uint64_t code_version_hash() { return fnv1a64(std::string("cqrl-") + kVersion); }

}  // namespace cqrl
