#pragma once

#include <string>
#include <vector>

#include "streamsched/rng.hpp"
#include "streamsched/simulator.hpp"
#include "streamsched/topology.hpp"

namespace streamsched {

/// Each thread on a uniformly drawn machine.
ScheduleMatrix random_schedule(int threads, int machines, Rng& rng);
ScheduleMatrix random_schedule(const TopologySpec& spec, const ClusterSpec& cluster, Rng& rng);

struct SchedulerSummary {
  std::string scheduler;
  std::vector<double> times;  // one stabilized measurement per repetition
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double variance = 0.0;
};

/// Names accepted by evaluate_scheduler.
std::vector<std::string> baseline_scheduler_names();

/// Repetition r uses seed derive_seed(sim.seed, r) both for the schedule
/// (random scheduler) and for the measurement. Throws kUnknownScheduler.
SchedulerSummary evaluate_scheduler(const std::string& name, const TopologySpec& spec,
                                    const ClusterSpec& cluster, const SimConfig& sim,
                                    int repetitions);

}  // namespace streamsched
