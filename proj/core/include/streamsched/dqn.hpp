#pragma once

#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "streamsched/agent_config.hpp"
#include "streamsched/dense_net.hpp"
#include "streamsched/encoding.hpp"
#include "streamsched/learning_agent.hpp"
#include "streamsched/replay_buffer.hpp"
#include "streamsched/reward_shaping.hpp"

namespace streamsched {

/// DQN baseline over the restricted action space: an action moves a single
/// thread i to machine j, so there are exactly N*M of them. The Q network
/// maps a state to one value per (i, j), index i*M + j.
class DqnAgent : public LearningAgent {
 public:
  struct Selection {
    int index = 0;
    ScheduleMatrix action;
    Eigen::VectorXd q_values;  // empty when the pick was random
    bool explored = false;
  };

  DqnAgent(const AgentConfig& config, StateEncoder encoder);

  const AgentConfig& config() const noexcept { return config_; }
  const StateEncoder& encoder() const noexcept { return encoder_; }
  DenseNet& q_net() noexcept { return q_net_; }
  DenseNet& q_target() noexcept { return q_target_; }
  ReplayBuffer& buffer() noexcept { return buffer_; }
  RewardShaper& shaper() noexcept { return shaper_; }

  int action_count() const noexcept { return encoder_.action_dim(); }
  /// The N*M single-thread moves from `current`, in index order.
  std::vector<ScheduleMatrix> candidates(const ScheduleMatrix& current) const;
  ScheduleMatrix apply(const ScheduleMatrix& current, int index) const;

  Eigen::VectorXd q_values(const SystemState& state) const;
  /// Epsilon-greedy over all N*M moves; greedy ties go to the lowest index.
  Selection select(const SystemState& state, double epsilon);

  std::vector<double> compute_targets(std::span<const TransitionSample* const> batch) const;
  double train_batch(std::span<const TransitionSample* const> batch);
  double train_step();

  std::string name() const override { return "dqn"; }
  void pretrain_offline(SchedulingEnvironment& env, int samples) override;
  EpisodeLog run_online(SchedulingEnvironment& env, int epochs,
                        const std::vector<WorkloadStep>& workload_steps) override;
  nlohmann::json checkpoint() const override;
  void restore(const nlohmann::json& checkpoint);

 private:
  AgentConfig config_;
  StateEncoder encoder_;
  DenseNet q_net_;
  DenseNet q_target_;
  ReplayBuffer buffer_;
  RewardShaper shaper_;
  Rng rng_;
};

}  // namespace streamsched
