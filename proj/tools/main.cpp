#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "streamsched/error.hpp"
#include "streamsched/experiment.hpp"
#include "streamsched/reporting.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

bool is_config_error(streamsched::ErrorCode code) {
  using streamsched::ErrorCode;
  switch (code) {
    case ErrorCode::kCycleDetected:
    case ErrorCode::kDanglingEdge:
    case ErrorCode::kZeroExecutors:
    case ErrorCode::kInvalidTopology:
    case ErrorCode::kInvalidCluster:
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kUnknownScheduler:
    case ErrorCode::kBadWindow:
    case ErrorCode::kScenarioMismatch:
    case ErrorCode::kKTooLarge:
      return true;
    default:
      return false;
  }
}

struct RunOptions {
  std::string config_path;
  std::string scenario;
  std::string scheduler;
  std::vector<std::uint64_t> seeds;
  std::optional<int> epochs;
  std::optional<int> pretrain_samples;
  std::optional<int> smoothing_window;
  std::string out;
};

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw streamsched::Error(streamsched::ErrorCode::kInvalidConfig, "cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw streamsched::Error(streamsched::ErrorCode::kInvalidConfig, path + ": " + e.what());
  }
}

int run_command(const RunOptions& opt) {
  nlohmann::json j = opt.config_path.empty() ? nlohmann::json::object()
                                             : read_json_file(opt.config_path);
  if (!opt.scenario.empty()) j["scenario"] = opt.scenario;
  if (!opt.scheduler.empty()) j["scheduler"] = opt.scheduler;
  if (!opt.seeds.empty()) j["seeds"] = opt.seeds;
  if (opt.epochs) j["epochs"] = *opt.epochs;
  if (opt.pretrain_samples) j["agent"]["pretrain_samples"] = *opt.pretrain_samples;
  if (opt.smoothing_window) j["smoothing_window"] = *opt.smoothing_window;
  if (!opt.out.empty()) j["out"] = opt.out;
  if (!j.contains("scenario")) {
    throw streamsched::Error(streamsched::ErrorCode::kInvalidConfig,
                             "no scenario given (use --scenario or a config file)");
  }
  const auto config = streamsched::experiment_config_from_json(j);
  const auto result = streamsched::run_experiment(config);
  for (const auto& s : result.seeds) {
    std::printf("seed %llu  stabilized %.4f ms  -> %s\n", static_cast<unsigned long long>(s.seed),
                s.stabilized_average * 1e3, s.episode_csv.string().c_str());
  }
  std::printf("%s on %s: mean stabilized %.4f ms (summary %s)\n", result.scheduler.c_str(),
              result.scenario.c_str(), result.mean_stabilized_average * 1e3,
              result.summary_json.string().c_str());
  return kExitOk;
}

int report_command(const std::vector<std::string>& summaries) {
  for (const auto& path : summaries) {
    const auto j = read_json_file(path);
    const auto s = streamsched::load_run_summary(path);
    std::printf("%s\n  scenario   %s\n  scheduler  %s\n  stabilized %.4f ms (mean of last %.0f%%)\n",
                path.c_str(), s.scenario.c_str(), s.scheduler.c_str(), s.stabilized_average * 1e3,
                streamsched::kStabilizedTailFraction * 100.0);
    for (const auto& seed : j.value("seeds", nlohmann::json::array())) {
      std::printf("    seed %-8s %.4f ms\n", seed.at("seed").dump().c_str(),
                  seed.at("stabilized_average").get<double>() * 1e3);
    }
  }
  return kExitOk;
}

int compare_command(const std::string& a_path, const std::string& b_path) {
  const auto a = streamsched::load_run_summary(a_path);
  const auto b = streamsched::load_run_summary(b_path);
  const double pct = streamsched::compare_report(a, b);
  std::printf("%s %.4f ms vs %s %.4f ms: %.1f%% %s\n", a.scheduler.c_str(),
              a.stabilized_average * 1e3, b.scheduler.c_str(), b.stabilized_average * 1e3,
              std::abs(pct), pct >= 0.0 ? "lower" : "higher");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scheduling experiments for stream processing topologies"};
  app.require_subcommand(1);

  RunOptions run_opt;
  auto* run = app.add_subcommand("run", "Train or evaluate a scheduler on a scenario");
  run->add_option("-c,--config", run_opt.config_path, "Experiment config (JSON)");
  run->add_option("--scenario", run_opt.scenario, "Scenario file (JSON)");
  run->add_option("--scheduler", run_opt.scheduler,
                  "round-robin | random | dqn | actor-critic");
  run->add_option("--seeds", run_opt.seeds, "Seed list")->delimiter(',');
  run->add_option("--epochs", run_opt.epochs, "Online decision epochs");
  run->add_option("--pretrain-samples", run_opt.pretrain_samples, "Offline training samples");
  run->add_option("--smoothing-window", run_opt.smoothing_window, "Odd reward smoothing window");
  run->add_option("--out", run_opt.out, "Output directory");

  std::vector<std::string> report_files;
  auto* report = app.add_subcommand("report", "Summarize finished runs");
  report->add_option("summaries", report_files, "Summary JSON files")->required();

  std::string cmp_a, cmp_b;
  auto* compare = app.add_subcommand("compare", "Relative improvement of run A over run B");
  compare->add_option("run_a", cmp_a, "Summary JSON of run A")->required();
  compare->add_option("run_b", cmp_b, "Summary JSON of run B")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return run_command(run_opt);
    if (*report) return report_command(report_files);
    if (*compare) return compare_command(cmp_a, cmp_b);
  } catch (const streamsched::Error& e) {
    std::cerr << "error [" << streamsched::to_string(e.code()) << "]: " << e.what() << '\n';
    return is_config_error(e.code()) ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
