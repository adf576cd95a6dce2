#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>

#include "cqrl/checkpoint.hpp"
#include "cqrl/cliff.hpp"
#include "cqrl/plotdata.hpp"
#include "cqrl/tabular.hpp"
#include "cqrl/train_loop.hpp"
#include "cqrl/version.hpp"

namespace {

using namespace cqrl;

int cmd_train(const std::string& config_path, long seed_override, bool paper_scale,
              const std::string& out_dir, int workers) {
  RunConfig cfg = RunConfig::load(config_path);
  if (paper_scale) cfg.apply_paper_scale();
  if (seed_override >= 0) cfg.seeds = {static_cast<uint64_t>(seed_override)};
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  const auto results = run_training(cfg, workers);
  for (const auto& r : results)
    std::printf("seed %llu: return %.2f collisions %.2f%% speed %.2f m/s (%ld episodes) -> %s\n",
                static_cast<unsigned long long>(r.seed), r.eval_metrics.mean_return,
                r.eval_metrics.collision_rate_pct, r.eval_metrics.mean_speed,
                r.eval_metrics.episodes, r.dir.c_str());
  std::printf("metrics: %s/metrics.csv\n", cfg.out_dir.c_str());
  return 0;
}

int cmd_eval(const std::string& checkpoint, const std::string& agent_name,
             const std::string& scenario, long steps, uint64_t seed, const std::string& out_dir,
             const std::string& config_path, bool force) {
  if (checkpoint.empty() == agent_name.empty())
    throw Error("eval: pass exactly one of --checkpoint or --agent");
  const ScenarioKind kind = scenario_from_name(scenario);
  EvalOutput out;
  std::string label;
  if (!agent_name.empty() &&
      (agent_name == "fixed" || agent_name == "naive" || agent_name == "aware")) {
    out = evaluate_planner(planner_from_name(agent_name), kind, steps, seed);
    label = agent_name;
  } else {
    RunConfig cfg;
    if (!config_path.empty()) cfg = RunConfig::load(config_path);
    std::string expected_hash = config_path.empty() ? "" : cfg.config_hash();
    AgentConfig acfg = cfg.agent_config;
    if (!checkpoint.empty()) {
      const CheckpointMeta meta = peek_checkpoint(checkpoint);
      acfg.algorithm = meta.algorithm;
      acfg.seed = meta.seed;
    } else {
      acfg.algorithm = agent_name;
    }
    // observation size comes from the simulator configuration
    SimParams params;
    ScenarioConfig scfg;
    Rng probe(1);
    WorldState w = spawn_scenario(kind, 1, probe, params, scfg);
    Ogm ogm = raycast_ogm(w, params);
    const auto road = road_mask(w, params, ogm);
    const Observation obs = build_observation(ogm, ogm, road, w.v, params.v_lim);
    auto agent = make_agent(acfg, static_cast<int>(obs.size()));
    if (!checkpoint.empty())
      load_checkpoint(checkpoint, agent->stores(), expected_hash, force);
    out = evaluate_agent(*agent, kind, steps, seed);
    label = acfg.algorithm;
  }
  std::filesystem::create_directories(out_dir);
  write_text_file(out_dir + "/trace.csv", trace_csv(out.trace));
  write_text_file(out_dir + "/metrics.csv", metrics_csv({{label, out.metrics}}));
  std::printf("%s on %s: return %.2f collisions %.2f%% speed %.2f m/s accel_p05 %.2f (%ld episodes)\n",
              label.c_str(), scenario.c_str(), out.metrics.mean_return,
              out.metrics.collision_rate_pct, out.metrics.mean_speed, out.metrics.accel_p05,
              out.metrics.episodes);
  std::printf("wrote %s/trace.csv and %s/metrics.csv\n", out_dir.c_str(), out_dir.c_str());
  return 0;
}

int cmd_oracle_cliff(double p, const std::string& mode, int n, double gamma,
                     const std::string& out_csv) {
  CliffConfig cfg;
  cfg.p = p;
  cfg.gamma = gamma;
  const MdpSpec mdp = cliff_as_mdp(cfg);
  std::vector<int> greedy;
  std::string csv;
  if (mode == "expected") {
    const auto res = expected_value_iteration(mdp);
    greedy = res.greedy;
    std::printf("expected value iteration: %s after %d sweeps\n",
                res.converged ? "converged" : "sweep cap reached", res.sweeps);
    // export as a single-quantile table
    QrViResult as_q;
    as_q.n = 1;
    as_q.z.assign(res.q.begin(), res.q.end());
    as_q.greedy = res.greedy;
    csv = oracle_csv(as_q, mdp.num_states, mdp.num_actions);
  } else if (mode == "conservative") {
    const auto res = tabular_qr_value_iteration(mdp, n, AggregationMode::kConservative);
    greedy = res.greedy;
    std::printf("conservative QR value iteration (N=%d): %s after %d sweeps\n", n,
                res.converged ? "converged" : "sweep cap reached", res.sweeps);
    csv = oracle_csv(res, mdp.num_states, mdp.num_actions);
  } else {
    throw Error("oracle: --mode must be expected or conservative");
  }
  std::printf("greedy policy (p=%g, gamma=%g):\n%s", p, gamma,
              render_policy(greedy, cfg).c_str());
  std::printf("classification: %s\n", cliff_path_name(classify_greedy_path(greedy, cfg)));
  if (!out_csv.empty()) {
    write_text_file(out_csv, csv);
    std::printf("wrote %s\n", out_csv.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conservative quantile-regression RL toolkit"};
  app.set_version_flag("--version", std::string("cqrl ") + cqrl::kVersion);
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "Train an agent per the JSON run config");
  std::string train_config, train_out;
  long train_seed = -1;
  bool paper_scale = false;
  int workers = 0;
  train->add_option("--config", train_config, "run config JSON")->required();
  train->add_option("--seed", train_seed, "train only this seed");
  train->add_flag("--paper-scale", paper_scale, "500k steps, 50k per level, 8 seeds");
  train->add_option("--out", train_out, "output directory (overrides config)");
  train->add_option("--workers", workers, "parallel seed workers (0 = auto)");

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint or a named planner");
  std::string eval_ckpt, eval_agent, eval_scenario = "curved-road", eval_out = "eval-out";
  std::string eval_config;
  long eval_steps = 10000;
  uint64_t eval_seed = 1;
  bool eval_force = false;
  eval->add_option("--checkpoint", eval_ckpt, "checkpoint file");
  eval->add_option("--agent", eval_agent, "fixed|naive|aware or an algorithm id");
  eval->add_option("--scenario", eval_scenario, "pedestrian-crossing|curved-road");
  eval->add_option("--steps", eval_steps, "evaluation step budget");
  eval->add_option("--seed", eval_seed, "evaluation seed");
  eval->add_option("--out", eval_out, "output directory");
  eval->add_option("--config", eval_config, "run config for checkpoint hash verification");
  eval->add_flag("--force", eval_force, "load checkpoints despite config hash mismatch");

  // oracle cliff
  auto* oracle = app.add_subcommand("oracle", "Tabular oracles");
  auto* cliff = oracle->add_subcommand("cliff", "Cliff-walk value iteration");
  double cliff_p = 0.1, cliff_gamma = 0.965;
  std::string cliff_mode = "expected", cliff_csv;
  int cliff_n = 32;
  cliff->add_option("--p", cliff_p, "down-replacement probability")->required();
  cliff->add_option("--mode", cliff_mode, "expected|conservative");
  cliff->add_option("--quantiles", cliff_n, "N quantiles (conservative mode)");
  cliff->add_option("--gamma", cliff_gamma, "discount");
  cliff->add_option("--csv", cliff_csv, "write the per-(state,action) table here");

  // plotdata
  auto* plot = app.add_subcommand("plotdata", "Aggregate run logs into plot-ready CSV bundles");
  std::vector<std::string> plot_runs;
  std::string plot_out = "plot-out";
  plot->add_option("--runs", plot_runs, "run directories")->required()->expected(-1);
  plot->add_option("--out", plot_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return cmd_train(train_config, train_seed, paper_scale, train_out, workers);
    if (*eval)
      return cmd_eval(eval_ckpt, eval_agent, eval_scenario, eval_steps, eval_seed, eval_out,
                      eval_config, eval_force);
    if (*oracle) {
      if (!*cliff) throw cqrl::Error("oracle: expected the 'cliff' subcommand");
      return cmd_oracle_cliff(cliff_p, cliff_mode, cliff_n, cliff_gamma, cliff_csv);
    }
    if (*plot) {
      const std::string manifest = cqrl::emit_plot_data(plot_runs, plot_out);
      std::fputs(manifest.c_str(), stdout);
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
