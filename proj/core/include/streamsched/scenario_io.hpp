#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "streamsched/agent_config.hpp"
#include "streamsched/simulator.hpp"
#include "streamsched/topology.hpp"

namespace streamsched {

/// One scenario file: application, cluster, measurement protocol and
/// optional agent hyperparameters.
struct Scenario {
  std::string name;
  TopologySpec topology;
  ClusterSpec cluster;
  SimConfig sim;
  std::optional<AgentConfig> agent;
};

nlohmann::json to_json(const TopologySpec& spec);
nlohmann::json to_json(const ClusterSpec& cluster);
nlohmann::json to_json(const SimConfig& config);
nlohmann::json to_json(const Scenario& scenario);

TopologySpec topology_from_json(const nlohmann::json& j);
ClusterSpec cluster_from_json(const nlohmann::json& j);
/// Missing keys keep the defaults of `base`.
SimConfig sim_config_from_json(const nlohmann::json& j, SimConfig base = {});
/// Validates topology, cluster and sim config. Throws kInvalidConfig for
/// malformed JSON and the validation error codes otherwise.
Scenario scenario_from_json(const nlohmann::json& j);

Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

}  // namespace streamsched
