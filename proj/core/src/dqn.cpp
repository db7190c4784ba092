#include "streamsched/dqn.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "streamsched/actor_critic.hpp"
#include "streamsched/baseline.hpp"
#include "streamsched/error.hpp"
#include "streamsched/exploration.hpp"

namespace streamsched {

DqnAgent::DqnAgent(const AgentConfig& config, StateEncoder encoder)
    : config_(config),
      encoder_(encoder),
      buffer_(static_cast<std::size_t>(config.buffer_capacity)),
      shaper_(config),
      rng_(config.seed) {
  validate_agent_config(config_);
  q_net_ = DenseNet::make(encoder_.state_dim(), config_.hidden_layers, encoder_.action_dim(),
                          Activation::kIdentity, rng_);
  q_target_ = q_net_;
}

ScheduleMatrix DqnAgent::apply(const ScheduleMatrix& current, int index) const {
  if (index < 0 || index >= action_count()) {
    throw Error(ErrorCode::kDimensionMismatch, "move index out of range");
  }
  return current.with_move(index / encoder_.machines(), index % encoder_.machines());
}

std::vector<ScheduleMatrix> DqnAgent::candidates(const ScheduleMatrix& current) const {
  std::vector<ScheduleMatrix> out;
  out.reserve(static_cast<std::size_t>(action_count()));
  for (int idx = 0; idx < action_count(); ++idx) out.push_back(apply(current, idx));
  return out;
}

Eigen::VectorXd DqnAgent::q_values(const SystemState& state) const {
  return forward(q_net_, encoder_.encode_state(state));
}

DqnAgent::Selection DqnAgent::select(const SystemState& state, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "epsilon must be in [0, 1]");
  }
  Selection sel;
  if (epsilon > 0.0 && uniform01(rng_) < epsilon) {
    sel.index = static_cast<int>(uniform_index(rng_, static_cast<std::uint64_t>(action_count())));
    sel.explored = true;
  } else {
    sel.q_values = q_values(state);
    sel.index = static_cast<int>(argmax_first(sel.q_values));
  }
  sel.action = apply(state.schedule, sel.index);
  return sel;
}

std::vector<double> DqnAgent::compute_targets(
    std::span<const TransitionSample* const> batch) const {
  Eigen::MatrixXd next(encoder_.state_dim(), static_cast<Eigen::Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    next.col(static_cast<Eigen::Index>(i)) = encoder_.encode_state(batch[i]->next_state);
  }
  const Eigen::MatrixXd q_next = forward_batch(q_target_, next);
  std::vector<double> y(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    y[i] = td_target(shaper_(batch[i]->reward), config_.gamma,
                     q_next.col(static_cast<Eigen::Index>(i)).maxCoeff());
  }
  return y;
}

double DqnAgent::train_batch(std::span<const TransitionSample* const> batch) {
  if (batch.empty()) throw Error(ErrorCode::kInsufficientSamples, "empty mini-batch");
  const auto y = compute_targets(batch);
  const auto h = static_cast<Eigen::Index>(batch.size());
  Eigen::MatrixXd states(encoder_.state_dim(), h);
  for (Eigen::Index i = 0; i < h; ++i) {
    const auto* t = batch[static_cast<std::size_t>(i)];
    if (t->action_index < 0 || t->action_index >= action_count()) {
      throw Error(ErrorCode::kDimensionMismatch, "transition lacks a move index");
    }
    states.col(i) = encoder_.encode_state(t->state);
  }
  const Eigen::MatrixXd q = forward_batch(q_net_, states);
  Eigen::MatrixXd upstream = Eigen::MatrixXd::Zero(q.rows(), h);
  std::vector<double> pred(static_cast<std::size_t>(h));
  for (Eigen::Index i = 0; i < h; ++i) {
    const int a = batch[static_cast<std::size_t>(i)]->action_index;
    pred[static_cast<std::size_t>(i)] = q(a, i);
    upstream(a, i) = 2.0 * (q(a, i) - y[static_cast<std::size_t>(i)]) / static_cast<double>(h);
  }
  const double loss = mean_squared_error(y, pred);
  sgd_step(q_net_, backward(q_net_, states, upstream),
           SgdConfig{config_.critic_learning_rate, config_.batch_size});
  soft_update(q_target_, q_net_, config_.tau);
  return loss;
}

double DqnAgent::train_step() {
  return train_batch(buffer_.sample(static_cast<std::size_t>(config_.batch_size), rng_));
}

void DqnAgent::pretrain_offline(SchedulingEnvironment& env, int samples) {
  const ScheduleMatrix initial = env.schedule();
  for (int n = 0; n < samples; ++n) {
    // A random deployed solution is the state; the move from it is the action.
    env.reset(random_schedule(env.threads(), env.machines(), rng_));
    const SystemState s = env.state();
    const int idx = static_cast<int>(uniform_index(rng_, static_cast<std::uint64_t>(action_count())));
    const ScheduleMatrix a = apply(s.schedule, idx);
    const auto step = env.deploy(a);
    shaper_.observe(step.reward);
    buffer_.push({s, a, step.reward, env.state(), idx});
    if (buffer_.size() >= static_cast<std::size_t>(config_.batch_size)) {
      for (int k = 0; k < config_.offline_steps_per_sample; ++k) train_step();
    }
  }
  env.reset(initial);
}

EpisodeLog DqnAgent::run_online(SchedulingEnvironment& env, int epochs,
                                const std::vector<WorkloadStep>& workload_steps) {
  const int decay = config_.epsilon_decay_epochs > 0
                        ? config_.epsilon_decay_epochs
                        : static_cast<int>(std::lround(0.8 * epochs));
  const EpsilonSchedule schedule{config_.epsilon_initial, config_.epsilon_final, decay};
  EpisodeLog log;
  log.reserve(static_cast<std::size_t>(std::max(epochs, 0)));
  for (int t = 0; t < epochs; ++t) {
    env.set_workload_scale(workload_scale_at(workload_steps, t));
    const SystemState s = env.state();
    const double eps = schedule.at(t);
    const Selection sel = select(s, eps);
    const auto step = env.deploy(sel.action);
    shaper_.observe(step.reward);
    buffer_.push({s, sel.action, step.reward, env.state(), sel.index});
    if (buffer_.size() >= static_cast<std::size_t>(config_.batch_size)) train_step();
    log.push_back({t, step.reward, eps, static_cast<int>(step.moved_threads.size()),
                   step.result.avg_tuple_processing_time});
  }
  return log;
}

nlohmann::json DqnAgent::checkpoint() const {
  return {{"agent", name()},
          {"config", to_json(config_)},
          {"encoder",
           {{"threads", encoder_.threads()},
            {"machines", encoder_.machines()},
            {"sources", encoder_.sources()},
            {"rate_scale", encoder_.rate_scale()}}},
          {"q_net", to_json(q_net_)},
          {"q_target", to_json(q_target_)},
          {"reward_mean", shaper_.mean()},
          {"reward_count", shaper_.count()}};
}

void DqnAgent::restore(const nlohmann::json& checkpoint) {
  try {
    if (checkpoint.at("agent").get<std::string>() != name()) {
      throw Error(ErrorCode::kArchitectureMismatch, "checkpoint is not a dqn agent");
    }
    DenseNet q = dense_net_from_json(checkpoint.at("q_net"));
    DenseNet t = dense_net_from_json(checkpoint.at("q_target"));
    if (!q.same_architecture(q_net_) || !t.same_architecture(q_net_)) {
      throw Error(ErrorCode::kArchitectureMismatch, "checkpoint networks have other shapes");
    }
    q_net_ = std::move(q);
    q_target_ = std::move(t);
    shaper_.restore(checkpoint.value("reward_mean", 0.0),
                    checkpoint.value("reward_count", std::uint64_t{0}));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptCheckpoint, e.what());
  }
}

}  // namespace streamsched
