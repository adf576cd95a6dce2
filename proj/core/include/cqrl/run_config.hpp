#pragma once

#include <string>
#include <vector>

#include "cqrl/agent_config.hpp"

namespace cqrl {

// Full experiment description. Serialized as strict JSON: unknown keys are
// rejected, every field has a default.
struct RunConfig {
  std::string scenario = "curved-road";
  std::string agent = "cqr-dqn-pi";  // algorithm id or fixed|naive|aware
  AgentConfig agent_config;
  long total_steps = 50000;     // desk scale; 500000 at paper scale
  long steps_per_level = 5000;  // desk scale; 50000 at paper scale
  std::vector<uint64_t> seeds = {1, 2, 3};
  long eval_steps = 10000;
  std::string out_dir = "runs/out";

  bool agent_is_planner() const;
  void validate() const;

  // Paper-scale flag: 500k steps, 50k per level, 8 seeds.
  void apply_paper_scale();

  std::string to_json() const;              // canonical (sorted keys)
  static RunConfig from_json(const std::string& text);
  static RunConfig load(const std::string& path);

  std::string config_hash() const;  // hex fnv-1a of the canonical json
};

}  // namespace cqrl
