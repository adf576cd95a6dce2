#include "cqrl/train_loop.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cqrl/checkpoint.hpp"
#include "cqrl/version.hpp"

namespace cqrl {

namespace fs = std::filesystem;

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw Error("write failed for '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

namespace {

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

struct CurveBucket {
  long steps = 0;
  double reward_sum = 0.0;
  double loss_sum = 0.0;
  long loss_count = 0;
  double return_sum = 0.0;
  long episodes = 0;
  long collisions = 0;
  double exploration_sum = 0.0;
};

// Mirrors eval_loop's episode wrapper for the training side.
struct Episode {
  WorldState world;
  Ogm ogm, ogm_prev;
  Observation obs;
  double episode_return = 0.0;

  Episode(ScenarioKind kind, int level, Rng& rng, const SimParams& params,
          const ScenarioConfig& scfg)
      : world(spawn_scenario(kind, level, rng, params, scfg)) {
    ogm = raycast_ogm(world, params);
    ogm_prev = ogm;
    refresh(params);
  }
  void refresh(const SimParams& params) {
    const auto road = road_mask(world, params, ogm);
    obs = build_observation(ogm, ogm_prev, road, world.v, params.v_lim);
  }
  StepResult advance(TrajectoryAction a, const SimParams& params) {
    const StepResult r = step_world(world, a, params);
    ogm_prev = std::move(ogm);
    ogm = raycast_ogm(world, params);
    refresh(params);
    episode_return += r.reward;
    return r;
  }
};

}  // namespace

SeedRunResult run_training_seed(const RunConfig& cfg, uint64_t seed, const std::string& seed_dir,
                                const SimParams& params, const ScenarioConfig& scfg) {
  cfg.validate();
  if (cfg.agent_is_planner())
    throw Error("run_training_seed: '" + cfg.agent + "' is a rule-based planner; use eval");
  fs::create_directories(seed_dir);

  AgentConfig acfg = cfg.agent_config;
  acfg.algorithm = cfg.agent;
  acfg.seed = seed;

  const ScenarioKind kind = scenario_from_name(cfg.scenario);

  // run metadata
  write_text_file(seed_dir + "/config.json", cfg.to_json());
  {
    nlohmann::json run{{"seed", seed},
                       {"version", kVersion},
                       {"code_hash", hex64(code_version_hash())},
                       {"config_hash", cfg.config_hash()},
                       {"algorithm", cfg.agent}};
    write_text_file(seed_dir + "/run.json", run.dump(2));
  }

  Rng env_rng(seed * 0x9e3779b97f4a7c15ull + 1);
  Rng agent_rng(seed * 0x2545f4914f6cdd1dull + 2);

  // probe observation size from a throwaway spawn
  int obs_dim;
  {
    Rng probe(1);
    Episode ep(kind, 1, probe, params, scfg);
    obs_dim = static_cast<int>(ep.obs.size());
  }
  auto agent = make_agent(acfg, obs_dim);

  std::ostringstream log;
  log << "step,episode,level,reward,loss,exploration,terminal\n";
  std::ostringstream curve;
  curve << "step,mean_reward,mean_episode_return,episodes,collision_rate,mean_loss,exploration\n";

  const long ckpt_every = std::max<long>(1, cfg.total_steps / 10);
  const long bucket_size = 1000;
  CurveBucket bucket;
  long episode_index = 0;

  CurriculumPoint cur = curriculum_level(0, cfg.steps_per_level, scfg);
  auto episode = std::make_unique<Episode>(kind, cur.level, env_rng, params, scfg);

  const CheckpointMeta meta_base{cfg.config_hash(), 0, seed, cfg.agent};
  for (long step = 0; step < cfg.total_steps; ++step) {
    cur = curriculum_level(step, cfg.steps_per_level, scfg);
    const Observation obs = episode->obs;
    const TrajectoryAction action = agent->act(obs, step, cfg.total_steps, false, agent_rng);
    const StepResult res = episode->advance(action, params);
    agent->push_transition(obs, episode->obs, action, res.reward, res.terminal);
    const TrainStats ts = agent->train_step(agent_rng);

    const float expl = agent->exploration_value(step, cfg.total_steps);
    log << step << "," << episode_index << "," << cur.level << "," << fmt9(res.reward) << ","
        << (ts.trained ? fmt9(ts.loss) : "") << "," << fmt9(expl) << ","
        << static_cast<int>(res.terminal) << "\n";

    bucket.steps += 1;
    bucket.reward_sum += res.reward;
    bucket.exploration_sum += expl;
    if (ts.trained) {
      bucket.loss_sum += ts.loss;
      bucket.loss_count += 1;
    }
    if (episode->world.done) {
      bucket.return_sum += episode->episode_return;
      bucket.episodes += 1;
      bucket.collisions += res.terminal == TerminalKind::kCollision ? 1 : 0;
      ++episode_index;
      const CurriculumPoint next_cur = curriculum_level(step + 1, cfg.steps_per_level, scfg);
      episode = std::make_unique<Episode>(kind, next_cur.level, env_rng, params, scfg);
    }
    if ((step + 1) % bucket_size == 0 || step + 1 == cfg.total_steps) {
      curve << (step + 1) << "," << fmt9(bucket.reward_sum / bucket.steps) << ","
            << (bucket.episodes ? fmt9(bucket.return_sum / bucket.episodes) : "") << ","
            << bucket.episodes << ","
            << (bucket.episodes
                    ? fmt9(100.0 * static_cast<double>(bucket.collisions) / bucket.episodes)
                    : "")
            << "," << (bucket.loss_count ? fmt9(bucket.loss_sum / bucket.loss_count) : "") << ","
            << fmt9(bucket.exploration_sum / bucket.steps) << "\n";
      bucket = CurveBucket{};
    }
    if ((step + 1) % ckpt_every == 0 && step + 1 != cfg.total_steps) {
      CheckpointMeta meta = meta_base;
      meta.step = step + 1;
      save_checkpoint(seed_dir + "/ckpt_" + std::to_string(step + 1) + ".cqrl", meta,
                      agent->stores());
    }
  }

  CheckpointMeta meta = meta_base;
  meta.step = cfg.total_steps;
  save_checkpoint(seed_dir + "/final.cqrl", meta, agent->stores());
  write_text_file(seed_dir + "/train_log.csv", log.str());
  write_text_file(seed_dir + "/train_curve.csv", curve.str());

  // final deterministic evaluation at difficulty 5
  const EvalOutput eval =
      evaluate_agent(*agent, kind, cfg.eval_steps, seed * 7919 + 13, 5, params, scfg);
  write_text_file(seed_dir + "/trace.csv", trace_csv(eval.trace));
  write_text_file(seed_dir + "/metrics.csv",
                  metrics_csv({{cfg.agent + "/seed" + std::to_string(seed), eval.metrics}}));

  SeedRunResult out;
  out.seed = seed;
  out.dir = seed_dir;
  out.eval_metrics = eval.metrics;
  out.eval_trace = eval.trace;
  return out;
}

std::vector<SeedRunResult> run_training(const RunConfig& cfg, int max_workers,
                                        const SimParams& params, const ScenarioConfig& scfg) {
  cfg.validate();
  fs::create_directories(cfg.out_dir);
  if (max_workers <= 0)
    max_workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), 2));

  std::vector<SeedRunResult> results(cfg.seeds.size());
  std::vector<std::string> errors(cfg.seeds.size());
  size_t next = 0;
  std::mutex mu;
  auto worker = [&]() {
    while (true) {
      size_t mine;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= cfg.seeds.size()) return;
        mine = next++;
      }
      const uint64_t seed = cfg.seeds[mine];
      try {
        results[mine] = run_training_seed(cfg, seed, cfg.out_dir + "/seed_" +
                                                         std::to_string(seed), params, scfg);
      } catch (const std::exception& e) {
        errors[mine] = e.what();
      }
    }
  };
  std::vector<std::thread> threads;
  const int nthreads = std::min<int>(max_workers, static_cast<int>(cfg.seeds.size()));
  for (int i = 0; i < nthreads; ++i) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  for (size_t i = 0; i < errors.size(); ++i)
    if (!errors[i].empty())
      throw Error("seed " + std::to_string(cfg.seeds[i]) + " failed: " + errors[i]);

  // per-seed and pooled metrics
  std::vector<std::pair<std::string, MetricsRow>> rows;
  std::vector<TraceRow> pooled;
  int episode_offset = 0;
  for (const auto& r : results) {
    rows.push_back({cfg.agent + "/seed" + std::to_string(r.seed), r.eval_metrics});
    int max_ep = -1;
    for (TraceRow row : r.eval_trace) {
      max_ep = std::max(max_ep, row.episode);
      row.episode += episode_offset;
      pooled.push_back(row);
    }
    episode_offset += max_ep + 1;
  }
  if (!pooled.empty()) rows.push_back({cfg.agent + "/pooled", compute_metrics(pooled)});
  write_text_file(cfg.out_dir + "/metrics.csv", metrics_csv(rows));
  return results;
}

}  // namespace cqrl
