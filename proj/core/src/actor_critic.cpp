#include "streamsched/actor_critic.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "streamsched/baseline.hpp"
#include "streamsched/error.hpp"

namespace streamsched {

double mean_squared_error(std::span<const double> targets, std::span<const double> predictions) {
  if (targets.size() != predictions.size() || targets.empty()) {
    throw Error(ErrorCode::kDimensionMismatch, "loss needs equally sized, nonempty series");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double d = targets[i] - predictions[i];
    sum += d * d;
  }
  return sum / static_cast<double>(targets.size());
}

std::size_t argmax_first(const Eigen::VectorXd& scores) {
  if (scores.size() == 0) throw Error(ErrorCode::kDimensionMismatch, "argmax of empty vector");
  std::size_t best = 0;
  for (Eigen::Index i = 1; i < scores.size(); ++i) {
    if (scores(i) > scores(static_cast<Eigen::Index>(best))) best = static_cast<std::size_t>(i);
  }
  return best;
}

ActorCriticAgent::ActorCriticAgent(const AgentConfig& config, StateEncoder encoder)
    : config_(config),
      encoder_(encoder),
      buffer_(static_cast<std::size_t>(config.buffer_capacity)),
      shaper_(config),
      rng_(config.seed) {
  validate_agent_config(config_);
  nets_.actor = DenseNet::make(encoder_.state_dim(), config_.hidden_layers, encoder_.action_dim(),
                               Activation::kTanh, rng_);
  nets_.critic = DenseNet::make(encoder_.critic_input_dim(), config_.hidden_layers, 1,
                                Activation::kIdentity, rng_);
  nets_.actor_target = nets_.actor;
  nets_.critic_target = nets_.critic;
}

ProtoAction ActorCriticAgent::propose(const SystemState& state) const {
  return encoder_.proto_from_actor_output(forward(nets_.actor, encoder_.encode_state(state)));
}

ActorCriticAgent::Selection ActorCriticAgent::select_from_proto(const SystemState& state,
                                                                const ProtoAction& proto) const {
  Selection sel;
  sel.proto = proto;
  const std::size_t space = action_space_size(encoder_.threads(), encoder_.machines());
  sel.candidates = k_nearest_actions(proto, std::min<std::size_t>(config_.k, space));
  sel.scores = score_actions(nets_.critic, encoder_, encoder_.encode_state(state),
                             sel.candidates.actions);
  sel.chosen = argmax_first(sel.scores);
  sel.action = sel.candidates.actions[sel.chosen];
  return sel;
}

ActorCriticAgent::Selection ActorCriticAgent::select(const SystemState& state, double epsilon) {
  return select_from_proto(state, explore(propose(state), epsilon, rng_));
}

Eigen::MatrixXd ActorCriticAgent::encode_states(std::span<const TransitionSample* const> batch,
                                                bool next) const {
  Eigen::MatrixXd s(encoder_.state_dim(), static_cast<Eigen::Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    s.col(static_cast<Eigen::Index>(i)) =
        encoder_.encode_state(next ? batch[i]->next_state : batch[i]->state);
  }
  return s;
}

std::vector<double> ActorCriticAgent::compute_targets(
    std::span<const TransitionSample* const> batch) const {
  const Eigen::MatrixXd next_states = encode_states(batch, true);
  const Eigen::MatrixXd protos = forward_batch(nets_.actor_target, next_states);
  const std::size_t k =
      std::min<std::size_t>(config_.k, action_space_size(encoder_.threads(), encoder_.machines()));
  std::vector<double> y(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    const auto knn = k_nearest_actions(encoder_.proto_from_actor_output(protos.col(col)), k);
    const Eigen::VectorXd q =
        score_actions(nets_.critic_target, encoder_, next_states.col(col), knn.actions);
    y[i] = td_target(shaper_(batch[i]->reward), config_.gamma, q.maxCoeff());
  }
  return y;
}

double ActorCriticAgent::critic_train_step(std::span<const TransitionSample* const> batch) {
  if (batch.empty()) throw Error(ErrorCode::kInsufficientSamples, "empty mini-batch");
  const auto y = compute_targets(batch);
  const auto h = static_cast<Eigen::Index>(batch.size());
  Eigen::MatrixXd inputs(encoder_.critic_input_dim(), h);
  for (Eigen::Index i = 0; i < h; ++i) {
    const auto* t = batch[static_cast<std::size_t>(i)];
    inputs.col(i) = encoder_.critic_input(t->state, t->action);
  }
  const Eigen::MatrixXd q = forward_batch(nets_.critic, inputs);
  std::vector<double> pred(static_cast<std::size_t>(h));
  Eigen::MatrixXd upstream(1, h);
  for (Eigen::Index i = 0; i < h; ++i) {
    pred[static_cast<std::size_t>(i)] = q(0, i);
    upstream(0, i) = 2.0 * (q(0, i) - y[static_cast<std::size_t>(i)]) / static_cast<double>(h);
  }
  const double loss = mean_squared_error(y, pred);
  const Gradients g = backward(nets_.critic, inputs, upstream);
  sgd_step(nets_.critic, g, SgdConfig{config_.critic_learning_rate, config_.batch_size});
  return loss;
}

double ActorCriticAgent::actor_objective(std::span<const TransitionSample* const> batch) const {
  const Eigen::MatrixXd states = encode_states(batch, false);
  const Eigen::MatrixXd out = forward_batch(nets_.actor, states);
  Eigen::MatrixXd inputs(encoder_.critic_input_dim(), states.cols());
  inputs.topRows(encoder_.state_dim()) = states;
  inputs.bottomRows(encoder_.action_dim()) = 0.5 * (out.array() + 1.0);
  return forward_batch(nets_.critic, inputs).mean();
}

Gradients ActorCriticAgent::actor_objective_gradient(
    std::span<const TransitionSample* const> batch) const {
  if (batch.empty()) throw Error(ErrorCode::kInsufficientSamples, "empty mini-batch");
  const Eigen::MatrixXd states = encode_states(batch, false);
  const auto h = states.cols();
  const Eigen::MatrixXd out = forward_batch(nets_.actor, states);
  Eigen::MatrixXd inputs(encoder_.critic_input_dim(), h);
  inputs.topRows(encoder_.state_dim()) = states;
  inputs.bottomRows(encoder_.action_dim()) = 0.5 * (out.array() + 1.0);

  // dQ/da at a = f(s_i), averaged over the batch through the upstream weight.
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Constant(1, h, 1.0 / static_cast<double>(h));
  const Gradients critic_grad = backward(nets_.critic, inputs, ones);
  // proto = (tanh_out + 1) / 2, and we descend on -J.
  const Eigen::MatrixXd upstream = -0.5 * critic_grad.input.bottomRows(encoder_.action_dim());
  return backward(nets_.actor, states, upstream);
}

void ActorCriticAgent::actor_train_step(std::span<const TransitionSample* const> batch) {
  const Gradients g = actor_objective_gradient(batch);
  sgd_step(nets_.actor, g, SgdConfig{config_.actor_learning_rate, config_.batch_size});
}

void ActorCriticAgent::update_targets() {
  soft_update(nets_.critic_target, nets_.critic, config_.tau);
  soft_update(nets_.actor_target, nets_.actor, config_.tau);
}

double ActorCriticAgent::train_step() {
  const auto batch = buffer_.sample(static_cast<std::size_t>(config_.batch_size), rng_);
  const double loss = critic_train_step(batch);
  actor_train_step(batch);
  update_targets();
  return loss;
}

void ActorCriticAgent::pretrain_offline(SchedulingEnvironment& env, int samples) {
  for (int n = 0; n < samples; ++n) {
    const SystemState s = env.state();
    const ScheduleMatrix a = random_schedule(env.threads(), env.machines(), rng_);
    const auto step = env.deploy(a);
    shaper_.observe(step.reward);
    buffer_.push({s, a, step.reward, env.state(), -1});
    if (buffer_.size() >= static_cast<std::size_t>(config_.batch_size)) {
      for (int k = 0; k < config_.offline_steps_per_sample; ++k) train_step();
    }
  }
}

EpisodeLog ActorCriticAgent::run_online(SchedulingEnvironment& env, int epochs,
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
    buffer_.push({s, sel.action, step.reward, env.state(), -1});
    if (buffer_.size() >= static_cast<std::size_t>(config_.batch_size)) train_step();
    log.push_back({t, step.reward, eps, static_cast<int>(step.moved_threads.size()),
                   step.result.avg_tuple_processing_time});
  }
  return log;
}

nlohmann::json ActorCriticAgent::checkpoint() const {
  return {{"agent", name()},
          {"config", to_json(config_)},
          {"encoder",
           {{"threads", encoder_.threads()},
            {"machines", encoder_.machines()},
            {"sources", encoder_.sources()},
            {"rate_scale", encoder_.rate_scale()}}},
          {"actor", to_json(nets_.actor)},
          {"critic", to_json(nets_.critic)},
          {"actor_target", to_json(nets_.actor_target)},
          {"critic_target", to_json(nets_.critic_target)},
          {"reward_mean", shaper_.mean()},
          {"reward_count", shaper_.count()}};
}

void ActorCriticAgent::restore(const nlohmann::json& checkpoint) {
  try {
    if (checkpoint.at("agent").get<std::string>() != name()) {
      throw Error(ErrorCode::kArchitectureMismatch, "checkpoint is not an actor-critic agent");
    }
    ActorCriticNets loaded{dense_net_from_json(checkpoint.at("actor")),
                           dense_net_from_json(checkpoint.at("critic")),
                           dense_net_from_json(checkpoint.at("actor_target")),
                           dense_net_from_json(checkpoint.at("critic_target"))};
    if (!loaded.actor.same_architecture(nets_.actor) ||
        !loaded.critic.same_architecture(nets_.critic) ||
        !loaded.actor_target.same_architecture(nets_.actor) ||
        !loaded.critic_target.same_architecture(nets_.critic)) {
      throw Error(ErrorCode::kArchitectureMismatch, "checkpoint networks have other shapes");
    }
    nets_ = std::move(loaded);
    shaper_.restore(checkpoint.value("reward_mean", 0.0),
                    checkpoint.value("reward_count", std::uint64_t{0}));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptCheckpoint, e.what());
  }
}

}  // namespace streamsched
