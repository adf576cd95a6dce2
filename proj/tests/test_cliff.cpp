#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "cqrl/cliff.hpp"
#include "cqrl/tabular.hpp"

using namespace cqrl;

TEST_CASE("cliff step: plain move costs -1") {
  CliffConfig cfg;
  cfg.p = 0.0;
  Rng rng(1);
  auto res = cliff_step(cfg, cfg.start_state(), CliffAction::kUp, rng);
  CHECK(res.reward == -1.0);
  CHECK_FALSE(res.terminal);
  CHECK(res.next_state == cfg.state_of(0, 1));
}

TEST_CASE("cliff step: entering the cliff costs -20 and terminates") {
  CliffConfig cfg;
  cfg.p = 0.0;
  Rng rng(1);
  auto res = cliff_step(cfg, cfg.state_of(5, 1), CliffAction::kDown, rng);
  CHECK(res.reward == -20.0);
  CHECK(res.terminal);
}

TEST_CASE("cliff step: forced replacement executes down") {
  CliffConfig cfg;
  cfg.p = 1.0;
  Rng rng(1);
  auto res = cliff_step(cfg, cfg.state_of(5, 1), CliffAction::kUp, rng);
  CHECK(res.reward == -20.0);
  CHECK(res.terminal);
}

TEST_CASE("cliff step: stepping from terminal cells raises") {
  CliffConfig cfg;
  Rng rng(1);
  CHECK_THROWS_AS(cliff_step(cfg, cfg.goal_state(), CliffAction::kUp, rng), Error);
  CHECK_THROWS_AS(cliff_step(cfg, cfg.state_of(4, 0), CliffAction::kUp, rng), Error);
}

TEST_CASE("cliff mdp: p=0 is deterministic, probabilities always sum to 1") {
  CliffConfig cfg;
  cfg.p = 0.0;
  auto mdp = cliff_as_mdp(cfg);
  mdp.validate();
  for (int s = 0; s < mdp.num_states; ++s)
    for (int a = 0; a < 4; ++a)
      if (!mdp.at(s, a).empty()) CHECK(mdp.at(s, a).size() == 1);
  cfg.p = 0.37;
  auto mdp2 = cliff_as_mdp(cfg);
  mdp2.validate();  // checks the 1e-9 sum invariant
}

TEST_CASE("cliff mdp agrees with sampled cliff_step frequencies within 1%") {
  CliffConfig cfg;
  cfg.p = 0.2;
  auto mdp = cliff_as_mdp(cfg);
  Rng rng(123);
  const int s = cfg.state_of(3, 2);
  for (int a = 0; a < 4; ++a) {
    std::map<int, int> counts;
    const int trials = 25000;  // 100k sampled steps across the four actions
    for (int i = 0; i < trials; ++i) {
      Rng step_rng(rng.next_u64());
      counts[cliff_step(cfg, s, static_cast<CliffAction>(a), step_rng).next_state]++;
    }
    for (const auto& o : mdp.at(s, a)) {
      const double freq = static_cast<double>(counts[o.next_state]) / trials;
      CHECK(freq == doctest::Approx(o.prob).epsilon(0.05));
      CHECK(std::abs(freq - o.prob) < 0.01);
    }
  }
}

namespace {

std::vector<int> hug_cliff_policy(const CliffConfig& cfg) {
  std::vector<int> pol(cfg.num_states(), static_cast<int>(CliffAction::kRight));
  pol[cfg.start_state()] = static_cast<int>(CliffAction::kUp);
  pol[cfg.state_of(cfg.width - 1, 1)] = static_cast<int>(CliffAction::kDown);
  return pol;
}

std::vector<int> row2_policy(const CliffConfig& cfg) {
  std::vector<int> pol(cfg.num_states(), static_cast<int>(CliffAction::kRight));
  pol[cfg.start_state()] = static_cast<int>(CliffAction::kUp);
  pol[cfg.state_of(0, 1)] = static_cast<int>(CliffAction::kUp);
  pol[cfg.state_of(cfg.width - 1, 2)] = static_cast<int>(CliffAction::kDown);
  pol[cfg.state_of(cfg.width - 1, 1)] = static_cast<int>(CliffAction::kDown);
  return pol;
}

}  // namespace

TEST_CASE("path classifier recognizes the three shapes") {
  CliffConfig cfg;
  CHECK(classify_greedy_path(hug_cliff_policy(cfg), cfg) == CliffPath::kPath1);
  CHECK(classify_greedy_path(row2_policy(cfg), cfg) == CliffPath::kPath2);
  std::vector<int> left(cfg.num_states(), static_cast<int>(CliffAction::kLeft));
  CHECK(classify_greedy_path(left, cfg) == CliffPath::kOther);
}

TEST_CASE("episode returns stay within the structural bounds") {
  CliffConfig cfg;
  cfg.p = 0.3;
  Rng rng(7);
  for (int ep = 0; ep < 300; ++ep) {
    int s = cfg.start_state();
    double ret = 0.0;
    int steps = 0;
    while (steps < 100) {
      ++steps;
      auto res = cliff_step(cfg, s, static_cast<CliffAction>(rng.uniform_int(4)), rng);
      ret += res.reward;
      if (res.terminal) break;
      s = res.next_state;
    }
    CHECK(ret >= -20.0 - steps);
    CHECK(ret <= -1.0);  // at least one step, shortest path costs 13
  }
}

TEST_CASE("expected VI reproduces the path flip across p") {
  CliffConfig cfg;
  cfg.gamma = 0.965;
  cfg.p = 0.01;
  auto vi1 = expected_value_iteration(cliff_as_mdp(cfg));
  CHECK(vi1.converged);
  CHECK(classify_greedy_path(vi1.greedy, cfg) == CliffPath::kPath1);
  cfg.p = 0.1;
  auto vi2 = expected_value_iteration(cliff_as_mdp(cfg));
  CHECK(vi2.converged);
  CHECK(classify_greedy_path(vi2.greedy, cfg) == CliffPath::kPath2);
}

TEST_CASE("conservative QR-VI avoids the cliff-adjacent row at both p values") {
  CliffConfig cfg;
  cfg.gamma = 0.965;
  for (double p : {0.01, 0.1}) {
    cfg.p = p;
    auto qr = tabular_qr_value_iteration(cliff_as_mdp(cfg), 32, AggregationMode::kConservative);
    CHECK(qr.converged);
    CHECK(classify_greedy_path(qr.greedy, cfg) == CliffPath::kPath2);
  }
}

TEST_CASE("mean-mode QR-VI matches expected VI on the cliff walk") {
  CliffConfig cfg;
  cfg.gamma = 0.965;
  cfg.p = 0.01;
  auto mdp = cliff_as_mdp(cfg);
  auto qr = tabular_qr_value_iteration(mdp, 32, AggregationMode::kMean);
  auto vi = expected_value_iteration(mdp);
  CHECK(classify_greedy_path(qr.greedy, cfg) == CliffPath::kPath1);
  double worst = 0.0;
  for (int s = 0; s < mdp.num_states; ++s)
    for (int a = 0; a < 4; ++a)
      worst = std::max(worst, std::abs(aggregate(qr.dist(s, a, 4), AggregationMode::kMean) -
                                       vi.q[s * 4 + a]));
  CHECK(worst < 1e-3);
}
