#include "cqrl/networks.hpp"

#include <cmath>

namespace cqrl {

namespace {

int mlp_body(Graph& g, const ParameterStorePtr& store, int x, int hidden) {
  int h = g.relu(g.dense(x, store, "fc1", hidden));
  return g.relu(g.dense(h, store, "fc2", hidden));
}

// Hidden width of an already-declared body (re-instantiating graphs over an
// existing store).
int hidden_of(const ParameterStorePtr& store) {
  return store->value(store->index_of("fc1/b")).shape[1];
}

Array filled(int rows, int cols, float v) {
  Array a({rows, cols});
  a.fill(v);
  return a;
}

// logsig = mid + half * tanh(raw), bounded inside [kLogStdMin, kLogStdMax]
int soft_clamp_log_std(Graph& g, int raw, int rows, int cols) {
  const float mid = 0.5f * (kLogStdMin + kLogStdMax);
  const float half = 0.5f * (kLogStdMax - kLogStdMin);
  return g.add(g.constant(filled(rows, cols, mid), "logstd_mid"),
               g.scalar_mul(g.tanh_(raw), half));
}

}  // namespace

QNetwork make_q_network(int obs_dim, int hidden, int num_actions, int n, int batch_size,
                        uint64_t init_seed) {
  QNetwork net;
  net.params = std::make_shared<ParameterStore>(init_seed);
  net.obs_dim = obs_dim;
  net.num_actions = num_actions;
  net.n = n;
  auto build = [&](Graph& g, int rows, int* in, int* out) {
    *in = g.input("obs", {rows, obs_dim});
    int h = mlp_body(g, net.params, *in, hidden);
    *out = g.dense(h, net.params, "head", num_actions * n);
  };
  build(net.batch, batch_size, &net.batch_obs, &net.batch_out);
  build(net.single, 1, &net.single_obs, &net.single_out);
  return net;
}

ActorNetwork make_actor_network(int obs_dim, int hidden, int batch_size, uint64_t init_seed) {
  ActorNetwork net;
  net.params = std::make_shared<ParameterStore>(init_seed);
  net.obs_dim = obs_dim;
  auto build = [&](Graph& g, int rows, int* in, int* mu, int* log_std) {
    *in = g.input("obs", {rows, obs_dim});
    int h = mlp_body(g, net.params, *in, hidden);
    *mu = g.dense(h, net.params, "mu", net.act_dim);
    int raw = g.dense(h, net.params, "log_std", net.act_dim);
    *log_std = soft_clamp_log_std(g, raw, rows, net.act_dim);
  };
  build(net.batch, batch_size, &net.batch_obs, &net.batch_mu, &net.batch_log_std);
  build(net.single, 1, &net.single_obs, &net.single_mu, &net.single_log_std);
  return net;
}

CriticNetwork make_critic_network(int obs_dim, int hidden, int n, int batch_size,
                                  uint64_t init_seed) {
  CriticNetwork net;
  net.params = std::make_shared<ParameterStore>(init_seed);
  net.obs_dim = obs_dim;
  net.n = n;
  Graph& g = net.batch;
  net.batch_obs = g.input("obs", {batch_size, obs_dim});
  net.batch_act = g.input("act", {batch_size, net.act_dim});
  int x = g.concat(net.batch_obs, net.batch_act);
  int h = mlp_body(g, net.params, x, hidden);
  net.batch_out = g.dense(h, net.params, "head", n);
  return net;
}

double squashed_log_density(double mu_v, double log_std_v, double xi_v, double half_v) {
  const double t = std::tanh(mu_v + std::exp(log_std_v) * xi_v);
  const double jac = half_v * (1.0 - t * t) + kSquashEps;
  return -log_std_v - 0.5 * xi_v * xi_v - 0.5 * std::log(2.0 * 3.141592653589793) -
         std::log(jac);
}

double squashed_log_density_of_action(double mu_v, double log_std_v, double action,
                                      double mid_v, double half_v) {
  double t = (action - mid_v) / half_v;
  t = std::clamp(t, -0.999999, 0.999999);
  const double u = 0.5 * std::log((1.0 + t) / (1.0 - t));  // atanh
  const double sigma = std::exp(log_std_v);
  const double xi = (u - mu_v) / sigma;
  const double jac = half_v * (1.0 - t * t) + kSquashEps;
  return -log_std_v - 0.5 * xi * xi - 0.5 * std::log(2.0 * 3.141592653589793) - std::log(jac);
}

ActorLossGraph make_actor_loss_graph(const ActorNetwork& actor, const CriticNetwork& critic1,
                                     const CriticNetwork& critic2, AggregationMode mode,
                                     float alpha, int batch_size) {
  ActorLossGraph out;
  out.batch = batch_size;
  Graph& g = out.graph;
  const int B = batch_size, D = actor.obs_dim, AD = actor.act_dim;
  const int N = critic1.n;

  out.in_obs = g.input("obs", {B, D});
  out.in_noise = g.input("noise", {B, AD});

  int h = mlp_body(g, actor.params, out.in_obs, hidden_of(actor.params));
  out.out_mu = g.dense(h, actor.params, "mu", AD);
  int raw = g.dense(h, actor.params, "log_std", AD);
  out.out_log_std = soft_clamp_log_std(g, raw, B, AD);

  int sigma = g.exp_(out.out_log_std);
  int u = g.add(out.out_mu, g.mul(sigma, out.in_noise));
  int t = g.tanh_(u);

  // critics consume actions in squashed [-1, 1] coordinates; the affine map
  // to physical ranges only matters for the environment and the density
  Array half({B, AD});
  const ActionRange vr = sac_vf_range(), lr = sac_lf_range();
  for (int b = 0; b < B; ++b) {
    half.data[b * AD + 0] = static_cast<float>(vr.half());
    half.data[b * AD + 1] = static_cast<float>(lr.half());
  }

  // twin critics on (obs, squashed action), elementwise min
  int qin = g.concat(out.in_obs, t);
  int h1 = mlp_body(g, critic1.params, qin, hidden_of(critic1.params));
  int q1 = g.dense(h1, critic1.params, "head", N);
  int h2 = mlp_body(g, critic2.params, qin, hidden_of(critic2.params));
  int q2 = g.dense(h2, critic2.params, "head", N);
  int qmin = g.min_(q1, q2);

  // aggregation mask: rows of 1/N (mean) or e_1 (conservative)
  Array mask({B, N});
  for (int b = 0; b < B; ++b)
    for (int j = 0; j < N; ++j)
      mask.data[b * N + j] = mode == AggregationMode::kMean ? 1.0f / N : (j == 0 ? 1.0f : 0.0f);
  int q_agg_sum = g.reduce_sum(g.mul(qmin, g.constant(mask, "agg_mask")));

  // log pi(a|s) = sum_dims [ -log sigma - xi^2/2 - log(2 pi)/2 - log(half (1 - t^2) + eps) ]
  int t2 = g.mul(t, t);
  int one_minus_t2 = g.add(g.constant(filled(B, AD, 1.0f), "one"), g.scalar_mul(t2, -1.0f));
  int jac = g.add(g.mul(g.constant(half, "act_half_j"), one_minus_t2),
                  g.constant(filled(B, AD, kSquashEps), "eps"));
  int log_jac = g.log_(jac);
  int xi2 = g.mul(out.in_noise, out.in_noise);
  int terms = g.add(g.add(g.scalar_mul(out.out_log_std, -1.0f), g.scalar_mul(xi2, -0.5f)),
                    g.add(g.scalar_mul(log_jac, -1.0f),
                          g.constant(filled(B, AD, -0.5f * std::log(2.0f * 3.14159265f)),
                                     "neg_half_log2pi")));
  int log_pi_sum = g.reduce_sum(terms);

  // loss = (alpha * sum log pi - sum q_agg) / B
  int loss = g.add(g.scalar_mul(log_pi_sum, alpha / B), g.scalar_mul(q_agg_sum, -1.0f / B));
  out.out_loss = loss;
  return out;
}

namespace {

// quantile-Huber over an output block: u = targets - mask*q, per-element
// weights w; loss = sum(w * Huber_kappa(u) / kappa) / (B * n_levels)
int td_loss_nodes(Graph& g, int q, int mask, int targets, int weights, float kappa, int batch,
                  int width, int n_levels) {
  int qm = g.mul(q, mask);
  int u = g.add(targets, g.scalar_mul(qm, -1.0f));
  int au = g.abs_(u);
  Array negk({batch, width});
  negk.fill(-kappa);
  int exc = g.relu(g.add(au, g.constant(negk, "neg_kappa")));
  int huber = g.add(g.scalar_mul(g.mul(u, u), 0.5f), g.scalar_mul(g.mul(exc, exc), -0.5f));
  int weighted = g.mul(weights, huber);
  return g.scalar_mul(g.reduce_sum(weighted), 1.0f / (kappa * batch * n_levels));
}

}  // namespace

TdLossGraph make_dqn_loss_graph(const QNetwork& net, int batch_size, float kappa) {
  TdLossGraph out;
  out.batch = batch_size;
  out.width = net.num_actions * net.n;
  Graph& g = out.graph;
  out.in_obs = g.input("obs", {batch_size, net.obs_dim});
  int h = mlp_body(g, net.params, out.in_obs, hidden_of(net.params));
  out.out_q = g.dense(h, net.params, "head", out.width);
  out.in_mask = g.input("mask", {batch_size, out.width});
  out.in_targets = g.input("targets", {batch_size, out.width});
  out.in_weights = g.input("weights", {batch_size, out.width});
  out.out_loss = td_loss_nodes(g, out.out_q, out.in_mask, out.in_targets, out.in_weights, kappa,
                               batch_size, out.width, net.n);
  return out;
}

TdLossGraph make_critic_loss_graph(const CriticNetwork& critic, int batch_size, float kappa) {
  TdLossGraph out;
  out.batch = batch_size;
  out.width = critic.n;
  Graph& g = out.graph;
  out.in_obs = g.input("obs", {batch_size, critic.obs_dim});
  out.in_act = g.input("act", {batch_size, critic.act_dim});
  int x = g.concat(out.in_obs, out.in_act);
  int h = mlp_body(g, critic.params, x, hidden_of(critic.params));
  out.out_q = g.dense(h, critic.params, "head", critic.n);
  out.in_mask = g.input("mask", {batch_size, out.width});
  out.in_targets = g.input("targets", {batch_size, out.width});
  out.in_weights = g.input("weights", {batch_size, out.width});
  out.out_loss = td_loss_nodes(g, out.out_q, out.in_mask, out.in_targets, out.in_weights, kappa,
                               batch_size, out.width, critic.n);
  return out;
}

}  // namespace cqrl
