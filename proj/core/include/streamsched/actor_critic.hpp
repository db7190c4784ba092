#pragma once

#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "streamsched/agent_config.hpp"
#include "streamsched/dense_net.hpp"
#include "streamsched/encoding.hpp"
#include "streamsched/environment.hpp"
#include "streamsched/episode.hpp"
#include "streamsched/exploration.hpp"
#include "streamsched/knn_action.hpp"
#include "streamsched/learning_agent.hpp"
#include "streamsched/replay_buffer.hpp"
#include "streamsched/reward_shaping.hpp"

namespace streamsched {

/// y = r + gamma * max_a Q'(s', a).
inline double td_target(double reward, double gamma, double max_next_q) {
  return reward + gamma * max_next_q;
}

/// Mean squared error between targets and predictions.
double mean_squared_error(std::span<const double> targets, std::span<const double> predictions);

/// Index of the largest score; the first one wins ties.
std::size_t argmax_first(const Eigen::VectorXd& scores);

/// Actor network, critic network and their slowly tracking copies.
struct ActorCriticNets {
  DenseNet actor;
  DenseNet critic;
  DenseNet actor_target;
  DenseNet critic_target;
};

/// Actor-critic scheduler: the actor proposes a relaxed schedule, the K
/// nearest feasible schedules are retrieved exactly, and the critic picks
/// among them. Training follows the DDPG pattern with replay and soft
/// target updates.
class ActorCriticAgent : public LearningAgent {
 public:
  struct Selection {
    ScheduleMatrix action;
    ProtoAction proto;
    KnnResult candidates;
    Eigen::VectorXd scores;
    std::size_t chosen = 0;
  };

  ActorCriticAgent(const AgentConfig& config, StateEncoder encoder);

  const AgentConfig& config() const noexcept { return config_; }
  const StateEncoder& encoder() const noexcept { return encoder_; }
  ActorCriticNets& nets() noexcept { return nets_; }
  const ActorCriticNets& nets() const noexcept { return nets_; }
  ReplayBuffer& buffer() noexcept { return buffer_; }
  RewardShaper& shaper() noexcept { return shaper_; }
  Rng& rng() noexcept { return rng_; }

  /// Actor output mapped into [0, 1]^(N x M).
  ProtoAction propose(const SystemState& state) const;
  /// Actor -> exploration -> K-NN -> critic argmax.
  Selection select(const SystemState& state, double epsilon);
  /// Critic argmax over the K-NN of an already explored proto-action.
  Selection select_from_proto(const SystemState& state, const ProtoAction& proto) const;

  /// Bellman targets for a mini-batch, using the target actor and critic.
  std::vector<double> compute_targets(std::span<const TransitionSample* const> batch) const;
  /// One SGD step on the critic's mean squared TD error; returns the loss
  /// before the step.
  double critic_train_step(std::span<const TransitionSample* const> batch);
  /// Gradient of -(1/H) sum Q(s_i, f(s_i)) with respect to the actor weights.
  Gradients actor_objective_gradient(std::span<const TransitionSample* const> batch) const;
  /// (1/H) sum Q(s_i, f(s_i)).
  double actor_objective(std::span<const TransitionSample* const> batch) const;
  /// One deterministic policy gradient ascent step.
  void actor_train_step(std::span<const TransitionSample* const> batch);
  void update_targets();
  /// Sample a mini-batch, train critic then actor, then soft-update targets.
  /// Throws kInsufficientSamples when the buffer holds fewer than H samples.
  double train_step();

  /// Collects `samples` random-action transitions from the environment,
  /// running `offline_steps_per_sample` train steps after each one.
  void pretrain_offline(SchedulingEnvironment& env, int samples) override;
  /// Online decision epochs; the environment's current schedule is s_1.
  EpisodeLog run_online(SchedulingEnvironment& env, int epochs,
                        const std::vector<WorkloadStep>& workload_steps) override;

  std::string name() const override { return "actor-critic"; }
  nlohmann::json checkpoint() const override;
  void restore(const nlohmann::json& checkpoint);

 private:
  Eigen::MatrixXd encode_states(std::span<const TransitionSample* const> batch,
                                bool next) const;

  AgentConfig config_;
  StateEncoder encoder_;
  ActorCriticNets nets_;
  ReplayBuffer buffer_;
  RewardShaper shaper_;
  Rng rng_;
};

}  // namespace streamsched
