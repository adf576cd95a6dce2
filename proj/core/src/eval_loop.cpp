#include "cqrl/eval_loop.hpp"

namespace cqrl {

namespace {

// One live episode: world plus the observation pipeline (previous-frame OGM,
// road mask, pooled channels).
struct Episode {
  WorldState world;
  Ogm ogm;
  Ogm ogm_prev;
  Observation obs;

  Episode(ScenarioKind kind, int level, Rng& rng, const SimParams& params,
          const ScenarioConfig& scfg)
      : world(spawn_scenario(kind, level, rng, params, scfg)) {
    ogm = raycast_ogm(world, params);
    ogm_prev = ogm;  // first step duplicates the current frame
    refresh_obs(params);
  }

  void refresh_obs(const SimParams& params) {
    const auto road = road_mask(world, params, ogm);
    obs = build_observation(ogm, ogm_prev, road, world.v, params.v_lim);
  }

  StepResult advance(TrajectoryAction action, const SimParams& params) {
    const StepResult res = step_world(world, action, params);
    ogm_prev = std::move(ogm);
    ogm = raycast_ogm(world, params);
    refresh_obs(params);
    return res;
  }
};

template <typename ActFn>
EvalOutput run_eval(ActFn&& act, ScenarioKind kind, long budget, uint64_t seed, int difficulty,
                    const SimParams& params, const ScenarioConfig& scfg) {
  Rng env_rng(seed);
  EvalOutput out;
  std::vector<TraceRow> episode_rows;
  int episode = 0;
  long step_budget = budget;
  while (step_budget > 0) {
    Episode ep(kind, difficulty, env_rng, params, scfg);
    episode_rows.clear();
    bool completed = false;
    while (step_budget > 0) {
      --step_budget;
      const TrajectoryAction action = act(ep);
      const StepResult res = ep.advance(action, params);
      TraceRow row;
      row.episode = episode;
      row.step = ep.world.step;
      row.s = static_cast<float>(ep.world.s);
      row.l = static_cast<float>(ep.world.l);
      row.v = static_cast<float>(ep.world.v);
      row.a = static_cast<float>(res.accel);
      row.reward = static_cast<float>(res.reward);
      row.collision = res.collision ? 1 : 0;
      row.occluder_clearance = static_cast<float>(ep.world.occluder_clearance);
      episode_rows.push_back(row);
      if (ep.world.done) {
        completed = true;
        break;
      }
    }
    if (completed) {
      out.trace.insert(out.trace.end(), episode_rows.begin(), episode_rows.end());
      ++episode;
    }
  }
  out.metrics = compute_metrics(out.trace);
  return out;
}

}  // namespace

EvalOutput evaluate_agent(LearningAgent& agent, ScenarioKind kind, long budget, uint64_t seed,
                          int difficulty, const SimParams& params, const ScenarioConfig& scfg) {
  Rng action_rng(seed ^ 0x5851f42d4c957f2dull);
  return run_eval(
      [&](Episode& ep) {
        return agent.act(ep.obs, 0, 1, /*deterministic=*/true, action_rng);
      },
      kind, budget, seed, difficulty, params, scfg);
}

EvalOutput evaluate_planner(PlannerKind planner, ScenarioKind kind, long budget, uint64_t seed,
                            int difficulty, const SimParams& params, const ScenarioConfig& scfg) {
  return run_eval(
      [&](Episode& ep) {
        const PlannerPerception per = build_perception(ep.world, ep.ogm, params);
        return run_planner(planner, per);
      },
      kind, budget, seed, difficulty, params, scfg);
}

}  // namespace cqrl
