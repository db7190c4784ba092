#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "streamsched/agent_config.hpp"
#include "streamsched/episode.hpp"
#include "streamsched/reporting.hpp"
#include "streamsched/scenario_io.hpp"

namespace streamsched {

struct ExperimentConfig {
  std::filesystem::path scenario_path;
  std::string scheduler = "round-robin";  // round-robin | random | dqn | actor-critic
  AgentConfig agent;
  SimConfig sim;
  std::vector<std::uint64_t> seeds{1};
  std::filesystem::path output_dir = "out";
  int smoothing_window = 1;
  std::vector<WorkloadStep> workload_steps;
};

std::vector<std::string> scheduler_names();

/// Throws kInvalidConfig (or kUnknownScheduler) describing the first problem.
void validate_experiment_config(const ExperimentConfig& config);

/// Builds a config from JSON. Agent and sim blocks start from the scenario's
/// own values, which in turn start from the library defaults.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& config);

struct SeedOutcome {
  std::uint64_t seed = 0;
  EpisodeLog log;
  double stabilized_average = 0.0;
  ScheduleMatrix final_schedule;
  std::filesystem::path episode_csv;
  std::filesystem::path checkpoint;
  nlohmann::json checkpoint_data;
};

struct ExperimentResult {
  std::string scenario;
  std::string scheduler;
  std::vector<SeedOutcome> seeds;
  double mean_stabilized_average = 0.0;
  std::filesystem::path summary_json;
};

/// Runs one seed against an already loaded scenario and writes nothing.
/// Learning schedulers pretrain offline, then run agent.epochs online
/// epochs; baselines deploy their schedule for the same number of epochs.
SeedOutcome run_seed(const ExperimentConfig& config, const Scenario& scenario,
                     std::uint64_t seed);

/// Loads the scenario, runs every seed and writes, per seed,
/// <scheduler>-seed<k>-episodes.csv, <scheduler>-seed<k>-rewards.csv and
/// <scheduler>-seed<k>-checkpoint.json, plus <scheduler>-summary.json.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Reads a summary JSON written by run_experiment.
RunSummary load_run_summary(const std::filesystem::path& summary_json);

}  // namespace streamsched
