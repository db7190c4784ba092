#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace streamsched {

struct AgentConfig {
  double gamma = 0.99;
  double tau = 0.01;
  int batch_size = 32;
  int buffer_capacity = 1000;
  double epsilon_initial = 1.0;
  double epsilon_final = 0.05;
  int epsilon_decay_epochs = 0;  // 0 = first 80% of the online epochs
  int k = 32;
  int epochs = 2000;
  int pretrain_samples = 10000;
  int offline_steps_per_sample = 3;
  double actor_learning_rate = 1e-3;
  double critic_learning_rate = 1e-3;
  std::vector<int> hidden_layers{64, 32};
  double rate_scale = 1000.0;   // tuples/s mapped to 1.0 in the state vector
  double reward_scale = 1.0;    // multiplier applied to rewards inside TD targets
  bool center_rewards = false;  // subtract the running mean reward inside TD targets
  std::uint64_t seed = 1;
};

void validate_agent_config(const AgentConfig& config);
nlohmann::json to_json(const AgentConfig& config);
/// Missing keys keep their defaults.
AgentConfig agent_config_from_json(const nlohmann::json& j, AgentConfig base = {});

}  // namespace streamsched
