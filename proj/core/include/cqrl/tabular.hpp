#pragma once

#include <functional>
#include <string>

#include "cqrl/mdp.hpp"
#include "cqrl/quantile.hpp"

namespace cqrl {

struct ExpectedViResult {
  std::vector<double> q;  // [S * A]
  std::vector<int> greedy;
  bool converged = false;
  int sweeps = 0;

  double at(int s, int a, int num_actions) const { return q[s * num_actions + a]; }
};

// Standard Bellman optimality sweeps, synchronous, threshold 1e-9. Greedy ties
// break toward the lowest action index.
ExpectedViResult expected_value_iteration(const MdpSpec& mdp, int max_sweeps = 100000,
                                          double tol = 1e-9);

struct QrViResult {
  int n = 0;                     // exported quantiles per (s,a)
  std::vector<double> z;         // [S * A * n], sorted per (s,a)
  std::vector<int> greedy;       // argmax_a aggregate(Z(s,a), mode)
  bool converged = false;
  int sweeps = 0;

  std::span<const double> dist(int s, int a, int num_actions) const {
    return {&z[(s * num_actions + a) * static_cast<size_t>(n)], static_cast<size_t>(n)};
  }
};

// Distributional Bellman sweeps: pool r + gamma*z across successor outcomes
// weighted by probability, sort the weighted samples, and project onto N
// equal-mass atoms (each the conditional mean of its 1/N probability slice,
// labeled by the midpoint level tau_j). The slice-mean projection keeps tail
// probabilities below 1/(2N) alive across sweeps and reproduces the pooled
// mean exactly, so mean-mode control coincides with expected value iteration.
// Greedy control uses aggregate(Z, mode) with ties toward the lowest action.
QrViResult tabular_qr_value_iteration(const MdpSpec& mdp, int n, AggregationMode mode,
                                      int max_sweeps = 4000, double tol = 1e-6);

struct QlearningConfig {
  int n = 32;
  AggregationMode mode = AggregationMode::kConservative;
  double lr = 0.1;
  double lr_final = 0.1;        // linear decay endpoint over `steps`
  double epsilon = 0.2;
  double epsilon_final = 0.2;   // linear decay endpoint over `steps`
  long steps = 200000;
  double kappa = 1.0;
  int episode_cap = 200;
};

struct QlearningResult {
  int n = 0;
  std::vector<double> z;  // [S * A * n]
  std::vector<int> greedy;
};

// Sampled quantile-regression Q-learning on an explicit MDP: epsilon-greedy
// behavior, per-transition quantile Huber SGD toward r + gamma * z(s', a*).
// `start_state` resets episodes; terminal outcomes reset as well.
QlearningResult tabular_quantile_qlearning(const MdpSpec& mdp, int start_state,
                                           const QlearningConfig& cfg, Rng& rng);

// CSV rows: state,action,q_1..q_N,greedy
std::string oracle_csv(const QrViResult& res, int num_states, int num_actions);

}  // namespace cqrl
