#include "streamsched/scenario_io.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "streamsched/error.hpp"

namespace streamsched {
namespace {

std::string distribution_name(ServiceDistribution d) {
  return d == ServiceDistribution::kDeterministic ? "deterministic" : "exponential";
}

ServiceDistribution distribution_from_name(const std::string& s) {
  if (s == "deterministic") return ServiceDistribution::kDeterministic;
  if (s == "exponential") return ServiceDistribution::kExponential;
  throw Error(ErrorCode::kInvalidConfig, "unknown service-time-distribution '" + s + "'");
}

std::string arrival_name(ArrivalProcess a) {
  return a == ArrivalProcess::kPeriodic ? "periodic" : "poisson";
}

ArrivalProcess arrival_from_name(const std::string& s) {
  if (s == "poisson") return ArrivalProcess::kPoisson;
  if (s == "periodic") return ArrivalProcess::kPeriodic;
  throw Error(ErrorCode::kInvalidConfig, "unknown arrival_process '" + s + "'");
}

template <typename T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

}  // namespace

nlohmann::json to_json(const TopologySpec& spec) {
  nlohmann::json components = nlohmann::json::array();
  for (const auto& c : spec.components) {
    components.push_back({{"id", c.id},
                          {"kind", to_string(c.kind)},
                          {"executor_count", c.executor_count},
                          {"service_time_mean", c.service_time_mean}});
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : spec.edges) {
    edges.push_back({{"from", e.from}, {"to", e.to}, {"grouping", to_string(e.grouping)}});
  }
  return {{"components", components}, {"edges", edges}, {"source_rates", spec.source_rates}};
}

nlohmann::json to_json(const ClusterSpec& cluster) {
  return {{"machine_count", cluster.machine_count},
          {"slots_per_machine", cluster.slots_per_machine},
          {"intra_machine_delay", cluster.intra_machine_delay},
          {"inter_machine_delay", cluster.inter_machine_delay},
          {"machine_capacity", cluster.machine_capacity},
          {"max_threads_per_process", cluster.max_threads_per_process},
          {"machine_speeds", cluster.machine_speeds}};
}

nlohmann::json to_json(const SimConfig& config) {
  return {{"seed", config.seed},
          {"warmup_duration", config.warmup_duration},
          {"measure_duration", config.measure_duration},
          {"measurement_samples", config.measurement_samples},
          {"sample_interval", config.sample_interval},
          {"service_time_distribution", distribution_name(config.service_time_distribution)},
          {"arrival_process", arrival_name(config.arrival_process)},
          {"queue_cap", config.queue_cap}};
}

nlohmann::json to_json(const Scenario& scenario) {
  nlohmann::json j{{"name", scenario.name},
                   {"topology", to_json(scenario.topology)},
                   {"cluster", to_json(scenario.cluster)},
                   {"sim", to_json(scenario.sim)}};
  if (scenario.agent) j["agent"] = to_json(*scenario.agent);
  return j;
}

TopologySpec topology_from_json(const nlohmann::json& j) {
  TopologySpec spec;
  for (const auto& jc : j.at("components")) {
    Component c;
    c.id = jc.at("id").get<std::string>();
    c.kind = component_kind_from_string(jc.at("kind").get<std::string>());
    c.executor_count = jc.at("executor_count").get<int>();
    c.service_time_mean = jc.at("service_time_mean").get<double>();
    spec.components.push_back(std::move(c));
  }
  for (const auto& je : j.value("edges", nlohmann::json::array())) {
    spec.edges.push_back({je.at("from").get<std::string>(), je.at("to").get<std::string>(),
                          grouping_from_string(je.value("grouping", std::string("shuffle")))});
  }
  spec.source_rates = j.value("source_rates", std::map<std::string, double>{});
  return spec;
}

ClusterSpec cluster_from_json(const nlohmann::json& j) {
  ClusterSpec c;
  c.machine_count = j.at("machine_count").get<int>();
  read_if(j, "slots_per_machine", c.slots_per_machine);
  read_if(j, "intra_machine_delay", c.intra_machine_delay);
  read_if(j, "inter_machine_delay", c.inter_machine_delay);
  read_if(j, "machine_capacity", c.machine_capacity);
  read_if(j, "max_threads_per_process", c.max_threads_per_process);
  read_if(j, "machine_speeds", c.machine_speeds);
  return c;
}

SimConfig sim_config_from_json(const nlohmann::json& j, SimConfig base) {
  read_if(j, "seed", base.seed);
  read_if(j, "warmup_duration", base.warmup_duration);
  read_if(j, "measure_duration", base.measure_duration);
  read_if(j, "measurement_samples", base.measurement_samples);
  read_if(j, "sample_interval", base.sample_interval);
  read_if(j, "queue_cap", base.queue_cap);
  if (auto it = j.find("service_time_distribution"); it != j.end()) {
    base.service_time_distribution = distribution_from_name(it->get<std::string>());
  }
  if (auto it = j.find("arrival_process"); it != j.end()) {
    base.arrival_process = arrival_from_name(it->get<std::string>());
  }
  return base;
}

Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario s;
  try {
    s.name = j.value("name", std::string("unnamed"));
    s.topology = topology_from_json(j.at("topology"));
    s.cluster = cluster_from_json(j.at("cluster"));
    s.sim = sim_config_from_json(j.value("sim", nlohmann::json::object()));
    if (auto it = j.find("agent"); it != j.end()) s.agent = agent_config_from_json(*it);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("scenario: ") + e.what());
  }
  validate_topology(s.topology);
  validate_cluster(s.cluster);
  validate_sim_config(s.sim);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidConfig, "cannot open scenario " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, path.string() + ": " + e.what());
  }
  return scenario_from_json(j);
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << to_json(scenario).dump(2) << '\n';
}

}  // namespace streamsched
