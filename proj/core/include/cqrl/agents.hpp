#pragma once

#include <memory>

#include "cqrl/adam.hpp"
#include "cqrl/networks.hpp"
#include "cqrl/observation.hpp"
#include "cqrl/replay.hpp"

namespace cqrl {

struct TrainStats {
  bool trained = false;
  float loss = 0.0f;         // TD loss (critic 1 for SAC)
  float critic2_loss = 0.0f;
  float actor_loss = 0.0f;
};

// One of the eight learning agents behind a uniform surface for the
// training/evaluation loops. Implementations record whatever they need from
// act() (e.g. the discrete index) for the following push_transition().
class LearningAgent {
 public:
  virtual ~LearningAgent() = default;

  virtual TrajectoryAction act(const Observation& obs, long step, long total_steps,
                               bool deterministic, Rng& rng) = 0;
  virtual void push_transition(const Observation& obs, const Observation& next_obs,
                               TrajectoryAction applied, double reward, TerminalKind term) = 0;
  virtual TrainStats train_step(Rng& rng) = 0;

  // epsilon (DQN family) or alpha (SAC family), for the per-step log
  virtual float exploration_value(long step, long total_steps) const = 0;
  virtual int replay_size() const = 0;
  virtual const AgentConfig& config() const = 0;

  // Named parameter stores in checkpoint order.
  virtual std::vector<std::pair<std::string, ParameterStorePtr>> stores() = 0;
};

std::unique_ptr<LearningAgent> make_agent(const AgentConfig& cfg, int obs_dim);

// Exposed pieces reused by tests.
class DqnAgent : public LearningAgent {
 public:
  DqnAgent(const AgentConfig& cfg, int obs_dim);

  TrajectoryAction act(const Observation& obs, long step, long total_steps, bool deterministic,
                       Rng& rng) override;
  int select_index(const Observation& obs, double epsilon, Rng& rng);
  void push_transition(const Observation& obs, const Observation& next_obs,
                       TrajectoryAction applied, double reward, TerminalKind term) override;
  TrainStats train_step(Rng& rng) override;
  float exploration_value(long step, long total_steps) const override;
  int replay_size() const override { return buffer_.size(); }
  const AgentConfig& config() const override { return cfg_; }
  std::vector<std::pair<std::string, ParameterStorePtr>> stores() override;

  QNetwork& net() { return net_; }
  QNetwork& target() { return target_; }
  long updates() const { return updates_; }

 private:
  AgentConfig cfg_;
  int obs_dim_, num_actions_, n_;
  QNetwork net_, target_;
  AdamState opt_;
  ReplayBuffer buffer_;
  std::vector<float> levels_;
  long updates_ = 0;
  int last_index_ = 0;
  Array obs_batch_, next_batch_, seed_;
};

class SacAgent : public LearningAgent {
 public:
  SacAgent(const AgentConfig& cfg, int obs_dim);

  TrajectoryAction act(const Observation& obs, long step, long total_steps, bool deterministic,
                       Rng& rng) override;
  void push_transition(const Observation& obs, const Observation& next_obs,
                       TrajectoryAction applied, double reward, TerminalKind term) override;
  TrainStats train_step(Rng& rng) override;
  float exploration_value(long, long) const override { return cfg_.alpha; }
  int replay_size() const override { return buffer_.size(); }
  const AgentConfig& config() const override { return cfg_; }
  std::vector<std::pair<std::string, ParameterStorePtr>> stores() override;

  ActorNetwork& actor() { return actor_; }
  CriticNetwork& critic1() { return critic1_; }
  CriticNetwork& critic2() { return critic2_; }

 private:
  void sample_batch(Rng& rng);

  AgentConfig cfg_;
  int obs_dim_, n_;
  ActorNetwork actor_;
  CriticNetwork critic1_, critic2_, target1_, target2_;
  ActorLossGraph actor_loss_;
  AdamState opt_actor_, opt_c1_, opt_c2_;
  ReplayBuffer buffer_;
  std::vector<float> levels_;
  std::vector<int> batch_idx_;
  Array obs_batch_, next_batch_, act_batch_, next_act_batch_, noise_, seed_;
};

}  // namespace cqrl
