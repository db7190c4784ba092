#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "streamsched/dense_net.hpp"
#include "streamsched/knn_action.hpp"
#include "streamsched/topology.hpp"

namespace streamsched {

/// Network input layout. A state is the row-major N*M schedule followed by
/// the source rates divided by `rate_scale`; the critic sees the state
/// followed by the N*M action.
class StateEncoder {
 public:
  StateEncoder() = default;
  StateEncoder(int threads, int machines, int sources, double rate_scale);

  int threads() const noexcept { return threads_; }
  int machines() const noexcept { return machines_; }
  int sources() const noexcept { return sources_; }
  double rate_scale() const noexcept { return rate_scale_; }
  int action_dim() const noexcept { return threads_ * machines_; }
  int state_dim() const noexcept { return action_dim() + sources_; }
  int critic_input_dim() const noexcept { return state_dim() + action_dim(); }

  Eigen::VectorXd encode_state(const SystemState& state) const;
  Eigen::VectorXd encode_action(const ScheduleMatrix& action) const;
  Eigen::VectorXd critic_input(const SystemState& state, const ScheduleMatrix& action) const;

  /// Actor output in [-1, 1] mapped to a proto-action in [0, 1], row-major.
  ProtoAction proto_from_actor_output(const Eigen::VectorXd& output) const;

 private:
  void check(const SystemState& state) const;

  int threads_ = 0;
  int machines_ = 0;
  int sources_ = 0;
  double rate_scale_ = 1.0;
};

/// Critic values for many one-hot actions under one encoded state. Uses the
/// sparsity of the action block: the first-layer pre-activation is the shared
/// state product plus N weight columns per action.
Eigen::VectorXd score_actions(const DenseNet& critic, const StateEncoder& encoder,
                              const Eigen::VectorXd& encoded_state,
                              std::span<const ScheduleMatrix> actions);

}  // namespace streamsched
