#include "cqrl/run_config.hpp"

#include <fstream>

#include <json.hpp>

#include "cqrl/version.hpp"

namespace cqrl {

using nlohmann::json;

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

bool RunConfig::agent_is_planner() const {
  return agent == "fixed" || agent == "naive" || agent == "aware";
}

void RunConfig::validate() const {
  scenario_from_name(scenario);
  if (!agent_is_planner()) {
    AgentConfig ac = agent_config;
    ac.algorithm = agent;
    ac.validate();
  }
  if (total_steps <= 0 || steps_per_level <= 0 || eval_steps <= 0)
    throw Error("run config: counts must be positive");
  if (seeds.empty()) throw Error("run config: at least one seed");
}

void RunConfig::apply_paper_scale() {
  total_steps = 500000;
  steps_per_level = 50000;
  seeds.clear();
  for (uint64_t s = 1; s <= 8; ++s) seeds.push_back(s);
}

namespace {

json agent_to_json(const AgentConfig& a) {
  return json{{"n_quantiles", a.n_quantiles},
              {"gamma", a.gamma},
              {"lr", a.lr},
              {"batch_size", a.batch_size},
              {"replay_capacity", a.replay_capacity},
              {"warmup_steps", a.warmup_steps},
              {"soft_target_rate", a.soft_target_rate},
              {"hard_target_interval", a.hard_target_interval},
              {"eps_start", a.eps_start},
              {"eps_final", a.eps_final},
              {"eps_fraction", a.eps_fraction},
              {"alpha", a.alpha},
              {"sac_tau_entropy", a.sac_tau_entropy},
              {"hidden", a.hidden},
              {"reward_scale", a.reward_scale}};
}

void agent_from_json(const json& j, AgentConfig* a) {
  for (const auto& [key, value] : j.items()) {
    if (key == "n_quantiles") a->n_quantiles = value.get<int>();
    else if (key == "gamma") a->gamma = value.get<float>();
    else if (key == "lr") a->lr = value.get<float>();
    else if (key == "batch_size") a->batch_size = value.get<int>();
    else if (key == "replay_capacity") a->replay_capacity = value.get<int>();
    else if (key == "warmup_steps") a->warmup_steps = value.get<int>();
    else if (key == "soft_target_rate") a->soft_target_rate = value.get<float>();
    else if (key == "hard_target_interval") a->hard_target_interval = value.get<int>();
    else if (key == "eps_start") a->eps_start = value.get<float>();
    else if (key == "eps_final") a->eps_final = value.get<float>();
    else if (key == "eps_fraction") a->eps_fraction = value.get<float>();
    else if (key == "alpha") a->alpha = value.get<float>();
    else if (key == "sac_tau_entropy") a->sac_tau_entropy = value.get<bool>();
    else if (key == "hidden") a->hidden = value.get<int>();
    else if (key == "reward_scale") a->reward_scale = value.get<float>();
    else throw Error("run config: unknown agent_config key '" + key + "'");
  }
}

}  // namespace

std::string RunConfig::to_json() const {
  json j{{"scenario", scenario},
         {"agent", agent},
         {"agent_config", agent_to_json(agent_config)},
         {"total_steps", total_steps},
         {"steps_per_level", steps_per_level},
         {"seeds", seeds},
         {"eval_steps", eval_steps},
         {"out_dir", out_dir}};
  return j.dump(2);
}

RunConfig RunConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw Error(std::string("run config: bad JSON: ") + e.what());
  }
  RunConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "scenario") c.scenario = value.get<std::string>();
    else if (key == "agent") c.agent = value.get<std::string>();
    else if (key == "agent_config") agent_from_json(value, &c.agent_config);
    else if (key == "total_steps") c.total_steps = value.get<long>();
    else if (key == "steps_per_level") c.steps_per_level = value.get<long>();
    else if (key == "seeds") c.seeds = value.get<std::vector<uint64_t>>();
    else if (key == "eval_steps") c.eval_steps = value.get<long>();
    else if (key == "out_dir") c.out_dir = value.get<std::string>();
    else throw Error("run config: unknown key '" + key + "'");
  }
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("run config: cannot open '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json(text);
}

std::string RunConfig::config_hash() const {
  // the output directory is not semantic configuration; two otherwise
  // identical runs must produce identical checkpoints
  json j = json::parse(to_json());
  j.erase("out_dir");
  return hex64(fnv1a64(j.dump(2)));
}

}  // namespace cqrl
