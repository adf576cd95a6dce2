#include <cstring>

#include "cqrl/agents.hpp"
#include "cqrl/targets.hpp"

namespace cqrl {

DqnAgent::DqnAgent(const AgentConfig& cfg, int obs_dim)
    : cfg_(cfg),
      obs_dim_(obs_dim),
      num_actions_(dqn_action_count()),
      n_(cfg.effective_n()),
      net_(make_q_network(obs_dim, cfg.hidden, num_actions_, n_, cfg.batch_size, cfg.seed)),
      target_(make_q_network(obs_dim, cfg.hidden, num_actions_, n_, cfg.batch_size,
                             cfg.seed + 0x7f4a7c15)),
      opt_(*net_.params, AdamConfig{cfg.lr}),
      buffer_(cfg.replay_capacity),
      obs_batch_({cfg.batch_size, obs_dim}),
      next_batch_({cfg.batch_size, obs_dim}),
      seed_({cfg.batch_size, num_actions_ * n_}) {
  cfg_.validate();
  if (cfg_.is_sac()) throw Error("DqnAgent: config is for the SAC family");
  target_.params->copy_from(*net_.params);
  const auto taus = quantile_midpoints(n_);
  levels_.assign(taus.begin(), taus.end());
}

int DqnAgent::select_index(const Observation& obs, double epsilon, Rng& rng) {
  if (epsilon > 0.0 && rng.uniform() < epsilon) {
    last_index_ = rng.uniform_int(num_actions_);
    return last_index_;
  }
  net_.single.set_input(net_.single_obs, obs.data.data(), obs.size());
  net_.single.run();
  const Array& q = net_.single.value(net_.single_out);
  int best = 0;
  float best_v = -std::numeric_limits<float>::infinity();
  for (int a = 0; a < num_actions_; ++a) {
    const float v =
        aggregate(std::span<const float>(&q.data[static_cast<size_t>(a) * n_], n_), cfg_.mode());
    if (v > best_v) {
      best_v = v;
      best = a;
    }
  }
  last_index_ = best;
  return best;
}

TrajectoryAction DqnAgent::act(const Observation& obs, long step, long total_steps,
                               bool deterministic, Rng& rng) {
  const double eps = deterministic ? 0.0 : cfg_.epsilon_at(step, total_steps);
  return dqn_action(select_index(obs, eps, rng));
}

float DqnAgent::exploration_value(long step, long total_steps) const {
  return cfg_.epsilon_at(step, total_steps);
}

void DqnAgent::push_transition(const Observation& obs, const Observation& next_obs,
                               TrajectoryAction applied, double reward, TerminalKind term) {
  Transition t;
  t.obs = obs.data;
  t.next_obs = next_obs.data;
  t.action_index = last_index_;
  t.action_vf = static_cast<float>(applied.v_f);
  t.action_lf = static_cast<float>(applied.l_f);
  t.reward = static_cast<float>(reward);
  t.terminal = term;
  buffer_.push(std::move(t));
}

TrainStats DqnAgent::train_step(Rng& rng) {
  TrainStats stats;
  if (buffer_.size() < cfg_.warmup_steps || buffer_.size() < cfg_.batch_size) return stats;
  const int B = cfg_.batch_size;
  const auto idx = buffer_.sample_indices(B, rng);

  std::vector<float> rewards(B);
  std::vector<TerminalKind> terms(B);
  std::vector<int> actions(B);
  for (int b = 0; b < B; ++b) {
    const Transition& t = buffer_.at(idx[b]);
    std::memcpy(&obs_batch_.data[static_cast<size_t>(b) * obs_dim_], t.obs.data(),
                sizeof(float) * obs_dim_);
    std::memcpy(&next_batch_.data[static_cast<size_t>(b) * obs_dim_], t.next_obs.data(),
                sizeof(float) * obs_dim_);
    rewards[b] = t.reward * cfg_.reward_scale;
    terms[b] = t.terminal;
    actions[b] = t.action_index;
  }

  target_.batch.set_input(target_.batch_obs, next_batch_.data.data(), next_batch_.numel());
  target_.batch.run();
  const Array& next_q = target_.batch.value(target_.batch_out);
  const auto targets =
      dqn_targets(std::span<const float>(next_q.data), B, num_actions_, n_, rewards, terms,
                  actions, cfg_.mode(), cfg_.variant(), cfg_.gamma);

  net_.batch.set_input(net_.batch_obs, obs_batch_.data.data(), obs_batch_.numel());
  net_.batch.run();
  const Array& q = net_.batch.value(net_.batch_out);

  seed_.fill(0.0f);
  double loss_acc = 0.0;
  const float inv_b = 1.0f / static_cast<float>(B);
  for (int b = 0; b < B; ++b) {
    const size_t base = (static_cast<size_t>(b) * num_actions_ + actions[b]) * n_;
    const auto res = quantile_huber_loss(
        std::span<const float>(&q.data[base], n_), levels_,
        std::span<const float>(&targets[static_cast<size_t>(b) * n_], n_), 1.0f);
    loss_acc += res.loss;
    for (int j = 0; j < n_; ++j)
      seed_.data[(static_cast<size_t>(b) * num_actions_ + actions[b]) * n_ + j] =
          res.grad[j] * inv_b;
  }

  net_.params->zero_grads();
  net_.batch.backward(net_.batch_out, seed_);
  opt_.step(*net_.params);
  ++updates_;
  if (updates_ % cfg_.hard_target_interval == 0) target_.params->copy_from(*net_.params);

  stats.trained = true;
  stats.loss = static_cast<float>(loss_acc * inv_b);
  return stats;
}

std::vector<std::pair<std::string, ParameterStorePtr>> DqnAgent::stores() {
  return {{"net", net_.params}, {"target", target_.params}};
}

}  // namespace cqrl
