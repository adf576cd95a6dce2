#pragma once

#include "cqrl/agent_config.hpp"
#include "cqrl/graph.hpp"

namespace cqrl {

// Shared body: flattened observation -> dense(hidden) relu -> dense(hidden)
// relu -> head(s). Declared parameter names are stable across graph
// instantiations so batch and single-observation graphs share one store.

// DQN family value network; output [B, A*N] read as [B, A, N].
struct QNetwork {
  ParameterStorePtr params;
  int obs_dim = 0, num_actions = 0, n = 0;
  Graph batch;
  int batch_obs = -1, batch_out = -1;
  Graph single;
  int single_obs = -1, single_out = -1;
};
QNetwork make_q_network(int obs_dim, int hidden, int num_actions, int n, int batch_size,
                        uint64_t init_seed);

// SAC actor; outputs mean and soft-clamped log-std per action dim.
struct ActorNetwork {
  ParameterStorePtr params;
  int obs_dim = 0, act_dim = 2;
  Graph batch;
  int batch_obs = -1, batch_mu = -1, batch_log_std = -1;
  Graph single;
  int single_obs = -1, single_mu = -1, single_log_std = -1;
};
ActorNetwork make_actor_network(int obs_dim, int hidden, int batch_size, uint64_t init_seed);

// SAC critic; the action is concatenated at the input in squashed [-1, 1]
// coordinates ((a - mid) / half per dimension), output [B, N].
struct CriticNetwork {
  ParameterStorePtr params;
  int obs_dim = 0, act_dim = 2, n = 0;
  Graph batch;
  int batch_obs = -1, batch_act = -1, batch_out = -1;
};
CriticNetwork make_critic_network(int obs_dim, int hidden, int n, int batch_size,
                                  uint64_t init_seed);

// Log-std soft clamp bounds (tanh-bounded inside [-20, 2]).
constexpr float kLogStdMin = -20.0f;
constexpr float kLogStdMax = 2.0f;
constexpr float kSquashEps = 1e-6f;

// Gaussian + tanh-squash log-density of an action sampled as
// a = mid + half * tanh(mu + sigma * xi), given xi. Matches the in-graph
// actor-loss formula term for term.
double squashed_log_density(double mu_v, double log_std_v, double xi_v, double half_v);
// Same quantity from a stored action value (inverts the squash).
double squashed_log_density_of_action(double mu_v, double log_std_v, double action,
                                      double mid_v, double half_v);

// The full actor objective as one differentiable graph:
//   loss = mean_B [ alpha * log pi(a|s) - aggregate(min(q1, q2)(s, a)) ]
// with a reparameterized through mu/sigma/noise, both critics evaluated
// in-graph and reduced by an elementwise min, and the aggregation realized by
// a per-row weight mask (1/N for mean mode, e_1 for conservative).
struct ActorLossGraph {
  Graph graph;
  int in_obs = -1, in_noise = -1;
  int out_loss = -1;
  int out_mu = -1, out_log_std = -1;
  int batch = 0;
};
ActorLossGraph make_actor_loss_graph(const ActorNetwork& actor, const CriticNetwork& critic1,
                                     const CriticNetwork& critic2, AggregationMode mode,
                                     float alpha, int batch_size);

// Quantile-Huber TD loss expressed in-graph (for gradient checking against
// the analytic path used in training). The caller feeds, per element of the
// [B, A*N] (or [B, N]) output: a 0/1 selection mask, targets placed in the
// selected slots, and the asymmetric weights |tau - 1[u<0]| computed from an
// unperturbed forward pass. Scalar output is the mean quantile-Huber loss.
struct TdLossGraph {
  Graph graph;
  int in_obs = -1, in_act = -1;  // in_act only for critic losses
  int in_mask = -1, in_targets = -1, in_weights = -1;
  int out_loss = -1, out_q = -1;
  int batch = 0, width = 0;
};
TdLossGraph make_dqn_loss_graph(const QNetwork& net, int batch_size, float kappa);
TdLossGraph make_critic_loss_graph(const CriticNetwork& critic, int batch_size, float kappa);

}  // namespace cqrl
