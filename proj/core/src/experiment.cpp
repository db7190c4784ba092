#include "streamsched/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <memory>

#include <nlohmann/json.hpp>

#include "streamsched/actor_critic.hpp"
#include "streamsched/baseline.hpp"
#include "streamsched/dqn.hpp"
#include "streamsched/environment.hpp"
#include "streamsched/error.hpp"

namespace streamsched {
namespace {

bool is_learning(const std::string& scheduler) {
  return scheduler == "dqn" || scheduler == "actor-critic";
}

std::string file_stem(const ExperimentConfig& config, std::uint64_t seed) {
  return config.scheduler + "-seed" + std::to_string(seed);
}

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

void write_reward_csv(const EpisodeLog& log, int window, const std::filesystem::path& path) {
  std::vector<double> rewards;
  rewards.reserve(log.size());
  for (const auto& r : log) rewards.push_back(r.reward);
  const auto normalized = normalize_rewards(rewards);
  const int n = static_cast<int>(rewards.size());
  const int w = window <= n ? window : (n % 2 == 1 ? n : n - 1);
  const auto smoothed = smooth_zero_phase(normalized.values, w);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << "epoch,reward,normalized,smoothed\n";
  char buf[96];
  for (std::size_t i = 0; i < log.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", log[i].epoch, rewards[i],
                  normalized.values[i], smoothed[i]);
    out << buf;
  }
}

nlohmann::json schedule_json(const ScheduleMatrix& s) {
  return {{"machines", s.machines()},
          {"machine_of_thread", std::vector<int>(s.assignment().begin(), s.assignment().end())}};
}

}  // namespace

std::vector<std::string> scheduler_names() {
  return {"round-robin", "random", "dqn", "actor-critic"};
}

void validate_experiment_config(const ExperimentConfig& config) {
  const auto names = scheduler_names();
  if (std::find(names.begin(), names.end(), config.scheduler) == names.end()) {
    throw Error(ErrorCode::kUnknownScheduler, "unknown scheduler '" + config.scheduler + "'");
  }
  if (config.seeds.empty()) throw Error(ErrorCode::kInvalidConfig, "seed list is empty");
  if (!std::filesystem::exists(config.scenario_path)) {
    throw Error(ErrorCode::kInvalidConfig,
                "scenario file not found: " + config.scenario_path.string());
  }
  if (config.smoothing_window < 1 || config.smoothing_window % 2 == 0) {
    throw Error(ErrorCode::kInvalidConfig, "smoothing window must be a positive odd integer");
  }
  if (config.agent.epochs < 1) throw Error(ErrorCode::kInvalidConfig, "epochs must be >= 1");
  for (const auto& step : config.workload_steps) {
    if (step.epoch < 0 || !(step.scale > 0.0)) {
      throw Error(ErrorCode::kInvalidConfig, "workload steps need epoch >= 0 and scale > 0");
    }
  }
  validate_agent_config(config.agent);
  validate_sim_config(config.sim);
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    c.scenario_path = j.at("scenario").get<std::string>();
    const Scenario scenario = load_scenario(c.scenario_path);
    c.agent = scenario.agent.value_or(AgentConfig{});
    c.sim = scenario.sim;
    c.scheduler = j.value("scheduler", c.scheduler);
    if (auto it = j.find("agent"); it != j.end()) c.agent = agent_config_from_json(*it, c.agent);
    if (auto it = j.find("sim"); it != j.end()) c.sim = sim_config_from_json(*it, c.sim);
    if (auto it = j.find("epochs"); it != j.end()) c.agent.epochs = it->get<int>();
    if (auto it = j.find("seeds"); it != j.end()) c.seeds = it->get<std::vector<std::uint64_t>>();
    if (auto it = j.find("out"); it != j.end()) c.output_dir = it->get<std::string>();
    c.smoothing_window = j.value("smoothing_window", c.smoothing_window);
    for (const auto& s : j.value("workload_steps", nlohmann::json::array())) {
      c.workload_steps.push_back({s.at("epoch").get<int>(), s.at("scale").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("experiment config: ") + e.what());
  }
  return c;
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : c.workload_steps) steps.push_back({{"epoch", s.epoch}, {"scale", s.scale}});
  return {{"scenario", c.scenario_path.string()},
          {"scheduler", c.scheduler},
          {"agent", to_json(c.agent)},
          {"sim", to_json(c.sim)},
          {"seeds", c.seeds},
          {"out", c.output_dir.string()},
          {"smoothing_window", c.smoothing_window},
          {"workload_steps", steps}};
}

SeedOutcome run_seed(const ExperimentConfig& config, const Scenario& scenario,
                     std::uint64_t seed) {
  SimConfig sim = config.sim;
  sim.seed = derive_seed(config.sim.seed, seed);
  SchedulingEnvironment env(scenario.topology, scenario.cluster, sim);
  SeedOutcome outcome;
  outcome.seed = seed;

  if (is_learning(config.scheduler)) {
    AgentConfig agent_config = config.agent;
    agent_config.seed = derive_seed(config.agent.seed, seed);
    StateEncoder encoder(env.threads(), env.machines(), env.sources(), agent_config.rate_scale);
    std::unique_ptr<LearningAgent> agent;
    if (config.scheduler == "dqn") {
      agent = std::make_unique<DqnAgent>(agent_config, encoder);
    } else {
      agent = std::make_unique<ActorCriticAgent>(agent_config, encoder);
    }
    agent->pretrain_offline(env, agent_config.pretrain_samples);
    env.reset(round_robin_schedule(scenario.topology, scenario.cluster));
    outcome.log = agent->run_online(env, agent_config.epochs, config.workload_steps);
    outcome.checkpoint_data = agent->checkpoint();
  } else {
    Rng rng(derive_seed(seed, 0x5eed));
    const ScheduleMatrix schedule = config.scheduler == "random"
                                        ? random_schedule(scenario.topology, scenario.cluster, rng)
                                        : round_robin_schedule(scenario.topology, scenario.cluster);
    for (int t = 0; t < config.agent.epochs; ++t) {
      env.set_workload_scale(workload_scale_at(config.workload_steps, t));
      const auto step = env.deploy(schedule);
      outcome.log.push_back({t, step.reward, 0.0, static_cast<int>(step.moved_threads.size()),
                             step.result.avg_tuple_processing_time});
    }
  }
  outcome.final_schedule = env.schedule();
  if (!is_learning(config.scheduler)) {
    outcome.checkpoint_data = {{"agent", config.scheduler},
                               {"schedule", schedule_json(outcome.final_schedule)}};
  }
  outcome.stabilized_average = stabilized_average(outcome.log);
  return outcome;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate_experiment_config(config);
  const Scenario scenario = load_scenario(config.scenario_path);
  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + config.output_dir.string());

  ExperimentResult result;
  result.scenario = scenario.name;
  result.scheduler = config.scheduler;
  nlohmann::json per_seed = nlohmann::json::array();
  double total = 0.0;
  for (std::uint64_t seed : config.seeds) {
    SeedOutcome outcome = run_seed(config, scenario, seed);
    const std::string stem = file_stem(config, seed);
    outcome.episode_csv = config.output_dir / (stem + "-episodes.csv");
    outcome.checkpoint = config.output_dir / (stem + "-checkpoint.json");
    write_episode_csv(outcome.log, outcome.episode_csv);
    write_reward_csv(outcome.log, config.smoothing_window,
                     config.output_dir / (stem + "-rewards.csv"));
    write_json(outcome.checkpoint_data, outcome.checkpoint);
    total += outcome.stabilized_average;
    per_seed.push_back({{"seed", seed},
                        {"stabilized_average", outcome.stabilized_average},
                        {"episode_csv", outcome.episode_csv.filename().string()},
                        {"checkpoint", outcome.checkpoint.filename().string()},
                        {"final_schedule", schedule_json(outcome.final_schedule)}});
    result.seeds.push_back(std::move(outcome));
  }
  result.mean_stabilized_average = total / static_cast<double>(config.seeds.size());
  result.summary_json = config.output_dir / (config.scheduler + "-summary.json");
  // The summary sits in the output directory, so it records no path to it.
  nlohmann::json resolved = to_json(config);
  resolved.erase("out");
  write_json({{"scenario", scenario.name},
              {"scheduler", config.scheduler},
              {"sim", to_json(config.sim)},
              {"config", resolved},
              {"stabilized_tail_fraction", kStabilizedTailFraction},
              {"stabilized_average", result.mean_stabilized_average},
              {"seeds", per_seed}},
             result.summary_json);
  return result;
}

RunSummary load_run_summary(const std::filesystem::path& summary_json) {
  std::ifstream in(summary_json);
  if (!in) throw Error(ErrorCode::kInvalidConfig, "cannot open " + summary_json.string());
  try {
    nlohmann::json j;
    in >> j;
    return {j.at("scenario").get<std::string>(), j.at("scheduler").get<std::string>(),
            j.at("sim"), j.at("stabilized_average").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, summary_json.string() + ": " + e.what());
  }
}

}  // namespace streamsched
