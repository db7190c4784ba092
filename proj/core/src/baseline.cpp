#include "streamsched/baseline.hpp"

#include <algorithm>
#include <numeric>

#include "streamsched/error.hpp"

namespace streamsched {

ScheduleMatrix random_schedule(int threads, int machines, Rng& rng) {
  if (threads < 0 || machines < 1) {
    throw Error(ErrorCode::kDimensionMismatch, "random schedule needs machines >= 1");
  }
  std::vector<int> assignment(static_cast<std::size_t>(threads));
  for (auto& m : assignment) {
    m = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(machines)));
  }
  return ScheduleMatrix(std::move(assignment), machines);
}

ScheduleMatrix random_schedule(const TopologySpec& spec, const ClusterSpec& cluster, Rng& rng) {
  return random_schedule(spec.total_executors(), cluster.machine_count, rng);
}

std::vector<std::string> baseline_scheduler_names() { return {"round-robin", "random"}; }

SchedulerSummary evaluate_scheduler(const std::string& name, const TopologySpec& spec,
                                    const ClusterSpec& cluster, const SimConfig& sim,
                                    int repetitions) {
  const auto names = baseline_scheduler_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw Error(ErrorCode::kUnknownScheduler, "unknown scheduler '" + name + "'");
  }
  if (repetitions < 1) throw Error(ErrorCode::kInvalidConfig, "repetitions must be >= 1");
  SchedulerSummary summary;
  summary.scheduler = name;
  for (int r = 0; r < repetitions; ++r) {
    const std::uint64_t seed = derive_seed(sim.seed, static_cast<std::uint64_t>(r));
    ScheduleMatrix schedule;
    if (name == "round-robin") {
      schedule = round_robin_schedule(spec, cluster);
    } else {
      Rng rng(seed);
      schedule = random_schedule(spec, cluster, rng);
    }
    SimConfig run = sim;
    run.seed = seed;
    summary.times.push_back(
        measure_after_stabilization(spec, cluster, schedule, run).avg_tuple_processing_time);
  }
  const auto n = static_cast<double>(summary.times.size());
  summary.mean = std::accumulate(summary.times.begin(), summary.times.end(), 0.0) / n;
  const auto [lo, hi] = std::minmax_element(summary.times.begin(), summary.times.end());
  summary.min = *lo;
  summary.max = *hi;
  double ss = 0.0;
  for (double t : summary.times) ss += (t - summary.mean) * (t - summary.mean);
  summary.variance = ss / n;
  return summary;
}

}  // namespace streamsched
