#pragma once

#include <filesystem>
#include <vector>

namespace streamsched {

struct EpisodeRecord {
  int epoch = 0;
  double reward = 0.0;
  double epsilon = 0.0;
  int moved_threads = 0;
  double avg_time_seconds = 0.0;
};

using EpisodeLog = std::vector<EpisodeRecord>;

/// From `epoch` onward every nominal source rate is multiplied by `scale`.
struct WorkloadStep {
  int epoch = 0;
  double scale = 1.0;
};

/// Scale in force at `epoch` (1.0 before the first step).
double workload_scale_at(const std::vector<WorkloadStep>& steps, int epoch);

/// CSV with header epoch,reward,epsilon,moved_threads,avg_time_seconds.
void write_episode_csv(const EpisodeLog& log, const std::filesystem::path& path);
EpisodeLog read_episode_csv(const std::filesystem::path& path);

}  // namespace streamsched
