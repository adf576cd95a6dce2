// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. `--only k[,k...]` restricts the run while developing.

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>

#include "cqrl/checkpoint.hpp"
#include "cqrl/cliff.hpp"
#include "cqrl/grad_check.hpp"
#include "cqrl/plotdata.hpp"
#include "cqrl/tabular.hpp"
#include "cqrl/train_loop.hpp"

using namespace cqrl;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  int id;
  const char* name;
  std::function<std::string()> run;  // empty string = pass, else failure detail
};

std::string tmp_dir(const std::string& tag) {
  const auto dir = fs::temp_directory_path() / ("cqrl_accept_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

// ---------------------------------------------------------------------- 1
std::string criterion_cliff_oracles() {
  const auto t0 = std::chrono::steady_clock::now();
  std::ostringstream fail;
  CliffConfig cfg;
  for (double p : {0.01, 0.1}) {
    cfg.p = p;
    const auto mdp = cliff_as_mdp(cfg);
    const auto vi = expected_value_iteration(mdp);
    const CliffPath want = p == 0.01 ? CliffPath::kPath1 : CliffPath::kPath2;
    if (classify_greedy_path(vi.greedy, cfg) != want)
      fail << "expected VI at p=" << p << " classified "
           << cliff_path_name(classify_greedy_path(vi.greedy, cfg)) << "; ";
    const auto qr = tabular_qr_value_iteration(mdp, 32, AggregationMode::kConservative);
    if (!qr.converged) fail << "conservative VI did not converge at p=" << p << "; ";
    if (classify_greedy_path(qr.greedy, cfg) != CliffPath::kPath2)
      fail << "conservative VI at p=" << p << " classified "
           << cliff_path_name(classify_greedy_path(qr.greedy, cfg)) << "; ";
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs >= 5.0) fail << "runtime " << secs << " s >= 5 s; ";
  return fail.str();
}

// ---------------------------------------------------------------------- 2
std::string criterion_sampled_qlearning() {
  const auto t0 = std::chrono::steady_clock::now();
  CliffConfig cfg;
  cfg.p = 0.1;
  const auto mdp = cliff_as_mdp(cfg);
  QlearningConfig qc;
  qc.lr = 0.2;
  qc.lr_final = 0.02;
  qc.epsilon = 0.3;
  qc.epsilon_final = 0.05;
  int path2 = 0;
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    const auto res = tabular_quantile_qlearning(mdp, cfg.start_state(), qc, rng);
    path2 += classify_greedy_path(res.greedy, cfg) == CliffPath::kPath2 ? 1 : 0;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream fail;
  if (path2 < 4) fail << "path2 in only " << path2 << "/5 seeds; ";
  if (secs >= 60.0) fail << "runtime " << secs << " s >= 60 s; ";
  return fail.str();
}

// ---------------------------------------------------------------------- 3
std::string criterion_quantile_fit() {
  Rng rng(2024);
  std::vector<float> samples(4000);
  for (auto& s : samples) s = rng.uniform() < 0.1 ? -20.0f : -13.0f;
  const int n = 10;
  std::vector<float> q(n, -16.0f);
  const auto taus = quantile_midpoints(n);
  std::vector<float> lev(taus.begin(), taus.end());
  for (int it = 0; it < 10000; ++it) {
    const auto res = quantile_huber_loss(q, lev, samples, 1.0f);
    for (int j = 0; j < n; ++j) q[j] -= 0.05f * res.grad[j] * n;
  }
  std::ostringstream fail;
  if (!(q[0] >= -20.5f && q[0] <= -19.5f))
    fail << "q_1 = " << q[0] << " outside [-20.5, -19.5]; ";
  if (!(q[9] >= -13.5f && q[9] <= -12.5f))
    fail << "q_10 = " << q[9] << " outside [-13.5, -12.5]; ";
  return fail.str();
}

// ---------------------------------------------------------------------- 4
std::string criterion_gradient_integrity() {
  Rng rng(7);
  double worst_dqn = 0, worst_critic = 0, worst_actor = 0;
  const int obs_dim = 5, B = 3;
  for (int inst = 0; inst < 100; ++inst) {
    {  // full DQN head TD loss
      QNetwork net = make_q_network(obs_dim, 8, 4, 3, B, rng.next_u64());
      TdLossGraph loss = make_dqn_loss_graph(net, B, 1.0f);
      Array obs({B, obs_dim});
      for (auto& v : obs.data) v = static_cast<float>(rng.uniform(-1, 1));
      Array mask({B, loss.width}), targets({B, loss.width}), weights({B, loss.width});
      loss.graph.set_input(loss.in_obs, obs);
      loss.graph.set_input(loss.in_mask, mask);
      loss.graph.set_input(loss.in_targets, targets);
      loss.graph.set_input(loss.in_weights, weights);
      loss.graph.run();
      const Array& qv = loss.graph.value(loss.out_q);
      const auto tausd = quantile_midpoints(3);
      for (int b = 0; b < B; ++b) {
        const int sel = rng.uniform_int(4);
        const float target = static_cast<float>(rng.uniform(-2, 2));
        for (int j = 0; j < 3; ++j) {
          const int col = sel * 3 + j;
          mask.data[b * loss.width + col] = 1.0f;
          targets.data[b * loss.width + col] = target;
          const float u = target - qv.data[b * loss.width + col];
          weights.data[b * loss.width + col] =
              u < 0 ? 1.0f - static_cast<float>(tausd[j]) : static_cast<float>(tausd[j]);
        }
      }
      loss.graph.set_input(loss.in_mask, mask);
      loss.graph.set_input(loss.in_targets, targets);
      loss.graph.set_input(loss.in_weights, weights);
      worst_dqn = std::max(worst_dqn,
                           gradient_check(loss.graph, loss.out_loss, {net.params}).max_rel_error);
    }
    {  // SAC critic TD loss
      CriticNetwork critic = make_critic_network(obs_dim, 8, 3, B, rng.next_u64());
      TdLossGraph loss = make_critic_loss_graph(critic, B, 1.0f);
      Array obs({B, obs_dim}), act({B, 2});
      for (auto& v : obs.data) v = static_cast<float>(rng.uniform(-1, 1));
      for (auto& v : act.data) v = static_cast<float>(rng.uniform(-1, 1));
      Array mask({B, 3}), targets({B, 3}), weights({B, 3});
      mask.fill(1.0f);
      loss.graph.set_input(loss.in_obs, obs);
      loss.graph.set_input(loss.in_act, act);
      loss.graph.set_input(loss.in_mask, mask);
      loss.graph.set_input(loss.in_targets, targets);
      loss.graph.set_input(loss.in_weights, weights);
      loss.graph.run();
      const Array& qv = loss.graph.value(loss.out_q);
      const auto tausd = quantile_midpoints(3);
      for (int b = 0; b < B; ++b) {
        const float target = static_cast<float>(rng.uniform(-2, 2));
        for (int j = 0; j < 3; ++j) {
          targets.data[b * 3 + j] = target;
          const float u = target - qv.data[b * 3 + j];
          weights.data[b * 3 + j] =
              u < 0 ? 1.0f - static_cast<float>(tausd[j]) : static_cast<float>(tausd[j]);
        }
      }
      loss.graph.set_input(loss.in_targets, targets);
      loss.graph.set_input(loss.in_weights, weights);
      worst_critic = std::max(
          worst_critic,
          gradient_check(loss.graph, loss.out_loss, {critic.params}).max_rel_error);
    }
    {  // SAC actor loss including the tanh-squash log-density correction
      ActorNetwork actor = make_actor_network(obs_dim, 8, B, rng.next_u64());
      CriticNetwork c1 = make_critic_network(obs_dim, 8, 3, B, rng.next_u64());
      CriticNetwork c2 = make_critic_network(obs_dim, 8, 3, B, rng.next_u64());
      const auto mode =
          inst % 2 == 0 ? AggregationMode::kMean : AggregationMode::kConservative;
      ActorLossGraph loss = make_actor_loss_graph(actor, c1, c2, mode, 0.2f, B);
      Array obs({B, obs_dim}), noise({B, 2});
      for (auto& v : obs.data) v = static_cast<float>(rng.uniform(-1, 1));
      for (auto& v : noise.data) v = static_cast<float>(rng.uniform(-1.5, 1.5));
      loss.graph.set_input(loss.in_obs, obs);
      loss.graph.set_input(loss.in_noise, noise);
      loss.graph.run();
      worst_actor = std::max(
          worst_actor,
          gradient_check(loss.graph, loss.out_loss, {actor.params, c1.params, c2.params})
              .max_rel_error);
    }
  }
  std::ostringstream fail;
  if (worst_dqn >= 1e-4) fail << "DQN head loss error " << worst_dqn << "; ";
  if (worst_critic >= 1e-4) fail << "SAC critic loss error " << worst_critic << "; ";
  if (worst_actor >= 1e-4) fail << "SAC actor loss error " << worst_actor << "; ";
  return fail.str();
}

// ---------------------------------------------------------------------- 5
std::string criterion_baseline_ordering() {
  SimParams params;
  auto rate = [&](PlannerKind pk, ScenarioKind kind) {
    int collided = 0;
    const int episodes = 500;
    for (int e = 0; e < episodes; ++e) {
      Rng rng(50000 + e);
      WorldState w = spawn_scenario(kind, 5, rng, params);
      while (!w.done) {
        Ogm ogm = raycast_ogm(w, params);
        const auto act = run_planner(pk, build_perception(w, ogm, params));
        if (step_world(w, act, params).collision) {
          ++collided;
          break;
        }
      }
    }
    return 100.0 * collided / episodes;
  };
  std::ostringstream fail;
  for (auto kind : {ScenarioKind::kCurvedRoad, ScenarioKind::kPedestrianCrossing}) {
    const double f = rate(PlannerKind::kFixed, kind);
    const double n = rate(PlannerKind::kNaive, kind);
    const double a = rate(PlannerKind::kAware, kind);
    std::printf("    [5] %s: aware %.2f%% naive %.2f%% fixed %.2f%%\n", scenario_name(kind), a,
                n, f);
    if (!(a <= n && n <= f))
      fail << scenario_name(kind) << ": ordering violated (" << a << ", " << n << ", " << f
           << "); ";
    if (kind == ScenarioKind::kCurvedRoad && a != 0.0)
      fail << "aware is " << a << "% on the curved road; ";
  }
  return fail.str();
}

// ---------------------------------------------------------------------- 6
std::string criterion_conservative_benefit() {
  const std::string root = tmp_dir("c6");
  const char* algos[3] = {"dqn", "qr-dqn", "cqr-dqn-pi"};
  MetricsRow per_seed[3][3];
  double mean_speed[3] = {0, 0, 0};
  for (int ai = 0; ai < 3; ++ai) {
    RunConfig cfg;
    cfg.scenario = "curved-road";
    cfg.agent = algos[ai];
    cfg.agent_config.gamma = 0.95f;
    cfg.agent_config.replay_capacity = 50000;
    cfg.total_steps = 50000;
    cfg.steps_per_level = 5000;
    cfg.seeds = {1, 2, 3};
    cfg.eval_steps = 10000;
    cfg.out_dir = root + "/" + algos[ai];
    const auto results = run_training(cfg, 2);
    for (int si = 0; si < 3; ++si) {
      per_seed[ai][si] = results[si].eval_metrics;
      mean_speed[ai] += results[si].eval_metrics.mean_speed / 3.0;
    }
  }
  std::ostringstream fail;
  int cqr_lowest = 0;
  for (int si = 0; si < 3; ++si) {
    std::printf("    [6] seed %d: dqn %.2f%% qr-dqn %.2f%% cqr-dqn-pi %.2f%%\n", si + 1,
                per_seed[0][si].collision_rate_pct, per_seed[1][si].collision_rate_pct,
                per_seed[2][si].collision_rate_pct);
    if (per_seed[2][si].collision_rate_pct < per_seed[0][si].collision_rate_pct &&
        per_seed[2][si].collision_rate_pct < per_seed[1][si].collision_rate_pct)
      ++cqr_lowest;
  }
  std::printf("    [6] mean eval speed: dqn %.2f qr-dqn %.2f cqr-dqn-pi %.2f m/s\n",
              mean_speed[0], mean_speed[1], mean_speed[2]);
  if (cqr_lowest < 2)
    fail << "cqr-dqn-pi strictly lowest collision rate in only " << cqr_lowest
         << "/3 seed-matched comparisons; ";
  if (!(mean_speed[2] < mean_speed[0] && mean_speed[2] < mean_speed[1]))
    fail << "cqr-dqn-pi mean evaluation speed is not the lowest; ";
  return fail.str();
}

// ---------------------------------------------------------------------- 7
std::string criterion_reward_units() {
  std::ostringstream fail;
  auto expect = [&](double got, double want, const char* what) {
    if (std::abs(got - want) > 1e-12) fail << what << " = " << got << " != " << want << "; ";
  };
  expect(reward_mobility(10, 14), 10.0, "r_m(10,14)");
  expect(reward_mobility(14, 14), 14.0, "r_m(14,14)");
  expect(reward_mobility(16, 14), 12.0, "r_m(16,14)");
  expect(reward_mobility(19, 14), 0.0, "r_m(19,14)");
  expect(reward_comfort(0, 0), 0.0, "r_c(0,0)");
  expect(reward_comfort(-2, 0.5), -4.5, "r_c(-2,0.5)");
  expect(reward_comfort(2, 0.5), reward_comfort(-2, 0.5), "r_c sign symmetry");
  expect(reward_step(true, 14, -1), 0.0, "r(collision)");
  expect(reward_step(false, 14, 0), 15.0, "r(14,0)");
  expect(reward_step(false, 0, -4.5), -3.5, "r(0,-4.5)");
  return fail.str();
}

// ---------------------------------------------------------------------- 8
std::string criterion_ogm_correctness() {
  SimParams params;
  Rng rng(99);
  double worst = 0.0;
  int scenes = 0;
  while (scenes < 200) {
    WorldState w;
    w.route = std::make_shared<Route>(make_straight_route(500.0));
    w.v = 3.0;
    OrientedRect occ;
    occ.center = {rng.uniform(7.0, 26.0), rng.uniform(-13.0, 13.0)};
    occ.half_len = rng.uniform(0.8, 4.0);
    occ.half_wid = rng.uniform(0.4, 2.0);
    occ.heading = rng.uniform(0.0, 3.14159);
    if (occ.contains({0.0, 0.0})) continue;
    ++scenes;
    w.occluders.push_back(occ);
    const Ogm g = raycast_ogm(w, params);
    const Pose ego = w.ego_pose();
    long mismatched = 0, compared = 0;
    for (int r = 0; r < g.h; ++r)
      for (int c = 0; c < g.w; ++c) {
        const Vec2 p = g.center_of(r, c);
        const Vec2 q = occ.to_local(p);
        if (std::abs(q.x) <= occ.half_len + g.cell && std::abs(q.y) <= occ.half_wid + g.cell)
          continue;  // surface band: occupancy, not shadow, decides
        const bool oracle_unknown =
            p.norm() > params.sensor_range || segment_hits_rect(ego.pos, p, occ);
        ++compared;
        if (oracle_unknown != (g.at(r, c) == Ogm::kUnknown)) ++mismatched;
      }
    worst = std::max(worst, static_cast<double>(mismatched) / compared);
  }
  std::printf("    [8] worst mislabeled fraction over 200 scenes: %.4f\n", worst);
  return worst <= 0.01 ? "" : "mislabeled fraction " + std::to_string(worst) + " > 1%";
}

// ---------------------------------------------------------------------- 9
std::string criterion_determinism() {
  const std::string a = tmp_dir("c9a"), b = tmp_dir("c9b");
  RunConfig cfg;
  cfg.scenario = "pedestrian-crossing";
  cfg.agent = "cqr-sac-pi";
  cfg.agent_config.hidden = 32;
  cfg.agent_config.batch_size = 16;
  cfg.agent_config.warmup_steps = 200;
  cfg.agent_config.n_quantiles = 8;
  cfg.agent_config.replay_capacity = 4000;
  cfg.total_steps = 2500;
  cfg.steps_per_level = 500;
  cfg.seeds = {11};
  cfg.eval_steps = 400;
  cfg.out_dir = a;
  run_training(cfg, 1);
  cfg.out_dir = b;
  run_training(cfg, 1);
  std::ostringstream fail;
  for (const char* f : {"/seed_11/final.cqrl", "/seed_11/metrics.csv", "/seed_11/trace.csv",
                        "/seed_11/train_log.csv"})
    if (read_text_file(a + f) != read_text_file(b + f)) fail << f << " differs; ";
  return fail.str();
}

// --------------------------------------------------------------------- 10
std::string criterion_pi_tau_distinction() {
  // crafted 3-state MDP quantile table at s', N=2, two actions; the stored
  // action (0) is not greedy (action 1 dominates)
  const std::vector<float> next_q = {0, 1, 10, 11};
  const std::vector<float> r = {1.0f};
  const std::vector<TerminalKind> t = {TerminalKind::kNone};
  const std::vector<int> stored = {0};
  const float gamma = 0.9f;
  const auto pi = dqn_targets(next_q, 1, 2, 2, r, t, stored, AggregationMode::kMean,
                              EvaluationVariant::kPolicy, gamma);
  const auto tau = dqn_targets(next_q, 1, 2, 2, r, t, stored, AggregationMode::kMean,
                               EvaluationVariant::kTrajectory, gamma);
  std::ostringstream fail;
  const float want_pi[2] = {1 + 0.9f * 10, 1 + 0.9f * 11};
  const float want_tau[2] = {1 + 0.9f * 0, 1 + 0.9f * 1};
  for (int j = 0; j < 2; ++j) {
    if (std::abs(pi[j] - want_pi[j]) > 1e-6)
      fail << "policy target " << pi[j] << " != " << want_pi[j] << "; ";
    if (std::abs(tau[j] - want_tau[j]) > 1e-6)
      fail << "trajectory target " << tau[j] << " != " << want_tau[j] << "; ";
  }
  if (pi == tau) fail << "variants coincide on a crafted divergent batch; ";
  return fail.str();
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      std::stringstream ss(argv[i + 1]);
      std::string tok;
      while (std::getline(ss, tok, ',')) only.insert(std::stoi(tok));
    }

  const Criterion criteria[] = {
      {1, "cliff-walk oracle reproduction (path1@p=.01, path2@p=.1, conservative path2@both)",
       criterion_cliff_oracles},
      {2, "tabular conservative Q-learning reaches path2 in >=4/5 seeds", criterion_sampled_qlearning},
      {3, "quantile regression recovers the two-point-law quantiles", criterion_quantile_fit},
      {4, "gradient integrity of DQN head, SAC critic and actor losses (100 instances each)",
       criterion_gradient_integrity},
      {5, "baseline collision ordering aware <= naive <= fixed, aware clean on the curve",
       criterion_baseline_ordering},
      {6, "desk-scale conservative benefit of CQR-DQN-pi over DQN/QR-DQN",
       criterion_conservative_benefit},
      {7, "reward unit examples reproduced exactly", criterion_reward_units},
      {8, "raycast unknown regions match the shadow oracle within 1%", criterion_ogm_correctness},
      {9, "identical config and seed give byte-identical checkpoints and metrics",
       criterion_determinism},
      {10, "policy vs trajectory targets differ exactly as hand-computed",
       criterion_pi_tau_distinction},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    std::string detail;
    try {
      detail = c.run();
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (detail.empty()) {
      std::printf("PASS criterion %d: %s\n", c.id, c.name);
    } else {
      std::printf("FAIL criterion %d: %s -- %s\n", c.id, c.name, detail.c_str());
      ++failures;
    }
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
