#pragma once

#include <string>
#include <vector>

#include "cqrl/graph.hpp"

namespace cqrl {

// Binary checkpoint: magic "CQRL", u32 format version, JSON metadata (config
// hash, step, seed, algorithm), then per named section a parameter manifest
// (name, shape) in declaration order followed by the raw little-endian
// float32 values.
struct CheckpointMeta {
  std::string config_hash;
  long step = 0;
  uint64_t seed = 0;
  std::string algorithm;
};

void save_checkpoint(const std::string& path, const CheckpointMeta& meta,
                     const std::vector<std::pair<std::string, ParameterStorePtr>>& sections);

// Loads into existing stores (layouts must match). When `force` is false a
// config-hash mismatch with `expected_hash` is refused.
CheckpointMeta load_checkpoint(const std::string& path,
                               const std::vector<std::pair<std::string, ParameterStorePtr>>& sections,
                               const std::string& expected_hash, bool force);

// Reads only the metadata block.
CheckpointMeta peek_checkpoint(const std::string& path);

}  // namespace cqrl
