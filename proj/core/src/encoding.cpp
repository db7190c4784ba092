#include "streamsched/encoding.hpp"

#include "streamsched/error.hpp"

namespace streamsched {

StateEncoder::StateEncoder(int threads, int machines, int sources, double rate_scale)
    : threads_(threads), machines_(machines), sources_(sources), rate_scale_(rate_scale) {
  if (threads < 1 || machines < 1 || sources < 0) {
    throw Error(ErrorCode::kDimensionMismatch, "encoder needs N >= 1, M >= 1, S >= 0");
  }
  if (!(rate_scale > 0.0)) throw Error(ErrorCode::kInvalidConfig, "rate-scale must be positive");
}

void StateEncoder::check(const SystemState& state) const {
  if (state.schedule.threads() != threads_ || state.schedule.machines() != machines_ ||
      static_cast<int>(state.workload.size()) != sources_) {
    throw Error(ErrorCode::kDimensionMismatch, "state does not match encoder dimensions");
  }
}

Eigen::VectorXd StateEncoder::encode_state(const SystemState& state) const {
  check(state);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(state_dim());
  for (int i = 0; i < threads_; ++i) v(i * machines_ + state.schedule.machine_of(i)) = 1.0;
  for (int k = 0; k < sources_; ++k) {
    v(action_dim() + k) = state.workload[static_cast<std::size_t>(k)] / rate_scale_;
  }
  return v;
}

Eigen::VectorXd StateEncoder::encode_action(const ScheduleMatrix& action) const {
  if (action.threads() != threads_ || action.machines() != machines_) {
    throw Error(ErrorCode::kDimensionMismatch, "action does not match encoder dimensions");
  }
  Eigen::VectorXd v = Eigen::VectorXd::Zero(action_dim());
  for (int i = 0; i < threads_; ++i) v(i * machines_ + action.machine_of(i)) = 1.0;
  return v;
}

Eigen::VectorXd StateEncoder::critic_input(const SystemState& state,
                                           const ScheduleMatrix& action) const {
  Eigen::VectorXd v(critic_input_dim());
  v << encode_state(state), encode_action(action);
  return v;
}

ProtoAction StateEncoder::proto_from_actor_output(const Eigen::VectorXd& output) const {
  if (output.size() != action_dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "actor output size differs from N*M");
  }
  ProtoAction proto(threads_, machines_);
  for (int i = 0; i < threads_; ++i) {
    for (int j = 0; j < machines_; ++j) proto(i, j) = 0.5 * (output(i * machines_ + j) + 1.0);
  }
  return proto;
}

Eigen::VectorXd score_actions(const DenseNet& critic, const StateEncoder& encoder,
                              const Eigen::VectorXd& encoded_state,
                              std::span<const ScheduleMatrix> actions) {
  if (critic.input_dim() != encoder.critic_input_dim() ||
      encoded_state.size() != encoder.state_dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "critic does not match encoder dimensions");
  }
  const auto& first = critic.layers().front();
  const int sd = encoder.state_dim();
  const int m = encoder.machines();
  const Eigen::VectorXd shared = first.weights.leftCols(sd) * encoded_state + first.bias;

  Eigen::MatrixXd z0(first.weights.rows(), static_cast<Eigen::Index>(actions.size()));
  for (std::size_t k = 0; k < actions.size(); ++k) {
    const auto& a = actions[k];
    if (a.threads() != encoder.threads() || a.machines() != m) {
      throw Error(ErrorCode::kDimensionMismatch, "candidate action shape differs");
    }
    auto col = z0.col(static_cast<Eigen::Index>(k));
    col = shared;
    for (int i = 0; i < a.threads(); ++i) col += first.weights.col(sd + i * m + a.machine_of(i));
  }
  Eigen::MatrixXd q = critic.forward_from_first_preactivation(z0);
  return q.row(0).transpose();
}

}  // namespace streamsched
