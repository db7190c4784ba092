#include "streamsched/agent_config.hpp"

#include <nlohmann/json.hpp>

#include "streamsched/error.hpp"

namespace streamsched {

void validate_agent_config(const AgentConfig& c) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidConfig, what); };
  if (!(c.gamma >= 0.0 && c.gamma < 1.0)) fail("gamma must be in [0, 1)");
  if (!(c.tau > 0.0 && c.tau <= 1.0)) fail("tau must be in (0, 1]");
  if (c.batch_size < 1) fail("batch size must be >= 1");
  if (c.buffer_capacity < 1) fail("buffer capacity must be >= 1");
  if (c.k < 1) fail("K must be >= 1");
  if (!(c.epsilon_initial >= 0.0 && c.epsilon_initial <= 1.0) ||
      !(c.epsilon_final >= 0.0 && c.epsilon_final <= 1.0)) {
    fail("epsilon values must be in [0, 1]");
  }
  if (c.epsilon_decay_epochs < 0) fail("epsilon decay epochs must be >= 0");
  if (c.epochs < 0 || c.pretrain_samples < 0 || c.offline_steps_per_sample < 0) {
    fail("epoch and sample counts must be >= 0");
  }
  if (!(c.actor_learning_rate > 0.0) || !(c.critic_learning_rate > 0.0)) {
    fail("learning rates must be positive");
  }
  for (int h : c.hidden_layers) {
    if (h < 1) fail("hidden layer sizes must be >= 1");
  }
  if (!(c.rate_scale > 0.0) || !(c.reward_scale > 0.0)) fail("scales must be positive");
}

nlohmann::json to_json(const AgentConfig& c) {
  return {{"gamma", c.gamma},
          {"tau", c.tau},
          {"batch_size", c.batch_size},
          {"buffer_capacity", c.buffer_capacity},
          {"epsilon_initial", c.epsilon_initial},
          {"epsilon_final", c.epsilon_final},
          {"epsilon_decay_epochs", c.epsilon_decay_epochs},
          {"k", c.k},
          {"epochs", c.epochs},
          {"pretrain_samples", c.pretrain_samples},
          {"offline_steps_per_sample", c.offline_steps_per_sample},
          {"actor_learning_rate", c.actor_learning_rate},
          {"critic_learning_rate", c.critic_learning_rate},
          {"hidden_layers", c.hidden_layers},
          {"rate_scale", c.rate_scale},
          {"reward_scale", c.reward_scale},
          {"center_rewards", c.center_rewards},
          {"seed", c.seed}};
}

AgentConfig agent_config_from_json(const nlohmann::json& j, AgentConfig c) {
  auto read = [&j](const char* key, auto& out) {
    if (auto it = j.find(key); it != j.end()) it->get_to(out);
  };
  read("gamma", c.gamma);
  read("tau", c.tau);
  read("batch_size", c.batch_size);
  read("buffer_capacity", c.buffer_capacity);
  read("epsilon_initial", c.epsilon_initial);
  read("epsilon_final", c.epsilon_final);
  read("epsilon_decay_epochs", c.epsilon_decay_epochs);
  read("k", c.k);
  read("epochs", c.epochs);
  read("pretrain_samples", c.pretrain_samples);
  read("offline_steps_per_sample", c.offline_steps_per_sample);
  read("actor_learning_rate", c.actor_learning_rate);
  read("critic_learning_rate", c.critic_learning_rate);
  read("hidden_layers", c.hidden_layers);
  read("rate_scale", c.rate_scale);
  read("reward_scale", c.reward_scale);
  read("center_rewards", c.center_rewards);
  read("seed", c.seed);
  return c;
}

}  // namespace streamsched
