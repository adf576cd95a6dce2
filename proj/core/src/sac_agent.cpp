#include <cstring>

#include "cqrl/agents.hpp"
#include "cqrl/targets.hpp"

namespace cqrl {

SacAgent::SacAgent(const AgentConfig& cfg, int obs_dim)
    : cfg_(cfg),
      obs_dim_(obs_dim),
      n_(cfg.effective_n()),
      actor_(make_actor_network(obs_dim, cfg.hidden, cfg.batch_size, cfg.seed)),
      critic1_(make_critic_network(obs_dim, cfg.hidden, n_, cfg.batch_size, cfg.seed + 1)),
      critic2_(make_critic_network(obs_dim, cfg.hidden, n_, cfg.batch_size, cfg.seed + 2)),
      target1_(make_critic_network(obs_dim, cfg.hidden, n_, cfg.batch_size, cfg.seed + 3)),
      target2_(make_critic_network(obs_dim, cfg.hidden, n_, cfg.batch_size, cfg.seed + 4)),
      actor_loss_(make_actor_loss_graph(actor_, critic1_, critic2_, cfg.mode(), cfg.alpha,
                                        cfg.batch_size)),
      opt_actor_(*actor_.params, AdamConfig{cfg.lr}),
      opt_c1_(*critic1_.params, AdamConfig{cfg.lr}),
      opt_c2_(*critic2_.params, AdamConfig{cfg.lr}),
      buffer_(cfg.replay_capacity),
      obs_batch_({cfg.batch_size, obs_dim}),
      next_batch_({cfg.batch_size, obs_dim}),
      act_batch_({cfg.batch_size, 2}),
      next_act_batch_({cfg.batch_size, 2}),
      noise_({cfg.batch_size, 2}),
      seed_({cfg.batch_size, n_}) {
  cfg_.validate();
  if (!cfg_.is_sac()) throw Error("SacAgent: config is for the DQN family");
  target1_.params->copy_from(*critic1_.params);
  target2_.params->copy_from(*critic2_.params);
  const auto taus = quantile_midpoints(n_);
  levels_.assign(taus.begin(), taus.end());
}

TrajectoryAction SacAgent::act(const Observation& obs, long, long, bool deterministic,
                               Rng& rng) {
  actor_.single.set_input(actor_.single_obs, obs.data.data(), obs.size());
  actor_.single.run();
  const Array& mu = actor_.single.value(actor_.single_mu);
  const Array& log_std = actor_.single.value(actor_.single_log_std);
  const ActionRange ranges[2] = {sac_vf_range(), sac_lf_range()};
  TrajectoryAction act;
  double vals[2];
  for (int d = 0; d < 2; ++d) {
    double u = mu.data[d];
    if (!deterministic) u += std::exp(log_std.data[d]) * rng.normal();
    vals[d] = ranges[d].mid() + ranges[d].half() * std::tanh(u);
  }
  act.v_f = vals[0];
  act.l_f = vals[1];
  return act;
}

void SacAgent::push_transition(const Observation& obs, const Observation& next_obs,
                               TrajectoryAction applied, double reward, TerminalKind term) {
  Transition t;
  t.obs = obs.data;
  t.next_obs = next_obs.data;
  t.action_vf = static_cast<float>(applied.v_f);
  t.action_lf = static_cast<float>(applied.l_f);
  t.reward = static_cast<float>(reward);
  t.terminal = term;
  buffer_.push(std::move(t));
}

void SacAgent::sample_batch(Rng& rng) {
  const int B = cfg_.batch_size;
  batch_idx_ = buffer_.sample_indices(B, rng);
  for (int b = 0; b < B; ++b) {
    const Transition& t = buffer_.at(batch_idx_[b]);
    std::memcpy(&obs_batch_.data[static_cast<size_t>(b) * obs_dim_], t.obs.data(),
                sizeof(float) * obs_dim_);
    std::memcpy(&next_batch_.data[static_cast<size_t>(b) * obs_dim_], t.next_obs.data(),
                sizeof(float) * obs_dim_);
    act_batch_.data[b * 2 + 0] =
        static_cast<float>((t.action_vf - sac_vf_range().mid()) / sac_vf_range().half());
    act_batch_.data[b * 2 + 1] =
        static_cast<float>((t.action_lf - sac_lf_range().mid()) / sac_lf_range().half());
  }
}

TrainStats SacAgent::train_step(Rng& rng) {
  TrainStats stats;
  if (buffer_.size() < cfg_.warmup_steps || buffer_.size() < cfg_.batch_size) return stats;
  const int B = cfg_.batch_size;
  sample_batch(rng);

  // next-state action and entropy term
  actor_.batch.set_input(actor_.batch_obs, next_batch_.data.data(), next_batch_.numel());
  actor_.batch.run();
  const Array& mu = actor_.batch.value(actor_.batch_mu);
  const Array& log_std = actor_.batch.value(actor_.batch_log_std);
  const ActionRange ranges[2] = {sac_vf_range(), sac_lf_range()};

  std::vector<float> rewards(B), log_pi(B, 0.0f);
  std::vector<TerminalKind> terms(B);
  const bool policy_variant = cfg_.variant() == EvaluationVariant::kPolicy;
  const bool entropy_in_targets = policy_variant || cfg_.sac_tau_entropy;
  for (int b = 0; b < B; ++b) {
    const Transition& t = buffer_.at(batch_idx_[b]);
    rewards[b] = t.reward * cfg_.reward_scale;
    terms[b] = t.terminal;
    double lp = 0.0;
    if (policy_variant) {
      for (int d = 0; d < 2; ++d) {
        const double xi = rng.normal();
        const double m = mu.data[b * 2 + d], ls = log_std.data[b * 2 + d];
        const double u = m + std::exp(ls) * xi;
        next_act_batch_.data[b * 2 + d] = static_cast<float>(std::tanh(u));
        lp += squashed_log_density(m, ls, xi, ranges[d].half());
      }
    } else {
      next_act_batch_.data[b * 2 + 0] =
          static_cast<float>((t.action_vf - ranges[0].mid()) / ranges[0].half());
      next_act_batch_.data[b * 2 + 1] =
          static_cast<float>((t.action_lf - ranges[1].mid()) / ranges[1].half());
      if (cfg_.sac_tau_entropy) {
        const double acts[2] = {t.action_vf, t.action_lf};
        for (int d = 0; d < 2; ++d)
          lp += squashed_log_density_of_action(mu.data[b * 2 + d], log_std.data[b * 2 + d],
                                               acts[d], ranges[d].mid(), ranges[d].half());
      }
    }
    log_pi[b] = static_cast<float>(lp);
  }

  // min of the twin target critics at (s', a')
  auto run_critic = [&](CriticNetwork& c, const Array& obs, const Array& act) -> const Array& {
    c.batch.set_input(c.batch_obs, obs.data.data(), obs.numel());
    c.batch.set_input(c.batch_act, act.data.data(), act.numel());
    c.batch.run();
    return c.batch.value(c.batch_out);
  };
  const Array& q1t = run_critic(target1_, next_batch_, next_act_batch_);
  const Array& q2t = run_critic(target2_, next_batch_, next_act_batch_);
  std::vector<float> qmin(static_cast<size_t>(B) * n_);
  for (size_t i = 0; i < qmin.size(); ++i) qmin[i] = std::min(q1t.data[i], q2t.data[i]);

  const auto targets = sac_targets(
      qmin, B, n_, rewards, terms, log_pi,
      entropy_in_targets ? EvaluationVariant::kPolicy : EvaluationVariant::kTrajectory,
      cfg_.alpha, cfg_.gamma);

  // critic updates
  float closs[2] = {0.0f, 0.0f};
  CriticNetwork* critics[2] = {&critic1_, &critic2_};
  AdamState* opts[2] = {&opt_c1_, &opt_c2_};
  for (int ci = 0; ci < 2; ++ci) {
    CriticNetwork& c = *critics[ci];
    const Array& q = run_critic(c, obs_batch_, act_batch_);
    seed_.fill(0.0f);
    double loss_acc = 0.0;
    const float inv_b = 1.0f / static_cast<float>(B);
    for (int b = 0; b < B; ++b) {
      const auto res = quantile_huber_loss(
          std::span<const float>(&q.data[static_cast<size_t>(b) * n_], n_), levels_,
          std::span<const float>(&targets[static_cast<size_t>(b) * n_], n_), 1.0f);
      loss_acc += res.loss;
      for (int j = 0; j < n_; ++j)
        seed_.data[static_cast<size_t>(b) * n_ + j] = res.grad[j] * inv_b;
    }
    c.params->zero_grads();
    c.batch.backward(c.batch_out, seed_);
    opts[ci]->step(*c.params);
    closs[ci] = static_cast<float>(loss_acc * inv_b);
  }

  // actor update through the frozen critics
  for (int i = 0; i < B * 2; ++i) noise_.data[i] = static_cast<float>(rng.normal());
  actor_loss_.graph.set_input(actor_loss_.in_obs, obs_batch_.data.data(), obs_batch_.numel());
  actor_loss_.graph.set_input(actor_loss_.in_noise, noise_.data.data(), noise_.numel());
  actor_loss_.graph.run();
  critic1_.params->frozen = true;
  critic2_.params->frozen = true;
  actor_.params->zero_grads();
  Array one({1});
  one.data[0] = 1.0f;
  actor_loss_.graph.backward(actor_loss_.out_loss, one);
  critic1_.params->frozen = false;
  critic2_.params->frozen = false;
  opt_actor_.step(*actor_.params);

  // soft target update
  target1_.params->blend_from(*critic1_.params, cfg_.soft_target_rate);
  target2_.params->blend_from(*critic2_.params, cfg_.soft_target_rate);

  stats.trained = true;
  stats.loss = closs[0];
  stats.critic2_loss = closs[1];
  stats.actor_loss = actor_loss_.graph.value(actor_loss_.out_loss).data[0];
  return stats;
}

std::vector<std::pair<std::string, ParameterStorePtr>> SacAgent::stores() {
  return {{"actor", actor_.params},
          {"critic1", critic1_.params},
          {"critic2", critic2_.params},
          {"target1", target1_.params},
          {"target2", target2_.params}};
}

std::unique_ptr<LearningAgent> make_agent(const AgentConfig& cfg, int obs_dim) {
  cfg.validate();
  if (cfg.is_sac()) return std::make_unique<SacAgent>(cfg, obs_dim);
  return std::make_unique<DqnAgent>(cfg, obs_dim);
}

}  // namespace cqrl
