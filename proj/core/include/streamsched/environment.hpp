#pragma once

#include <cstdint>
#include <vector>

#include "streamsched/simulator.hpp"
#include "streamsched/topology.hpp"

namespace streamsched {

/// Stand-in for the managed cluster: deploys a schedule, waits for the
/// system to settle and reports the measurement. Every deployment draws a
/// fresh simulator seed from (base seed, deployment counter).
class SchedulingEnvironment {
 public:
  struct Step {
    SimResult result;
    double reward = 0.0;
    std::vector<int> moved_threads;
  };

  SchedulingEnvironment(TopologySpec topology, ClusterSpec cluster, SimConfig sim);

  const TopologySpec& topology() const noexcept { return topology_; }
  const ClusterSpec& cluster() const noexcept { return cluster_; }
  const SimConfig& sim_config() const noexcept { return sim_; }
  int threads() const { return topology_.total_executors(); }
  int machines() const { return cluster_.machine_count; }
  int sources() const { return static_cast<int>(nominal_workload_.size()); }

  SystemState state() const { return {schedule_, workload()}; }
  const ScheduleMatrix& schedule() const noexcept { return schedule_; }
  std::vector<double> workload() const;
  double workload_scale() const noexcept { return workload_scale_; }
  /// Multiplies every nominal source rate by `scale`.
  void set_workload_scale(double scale);
  void reset(const ScheduleMatrix& schedule);

  /// Moves only the threads whose machine changes, then measures.
  Step deploy(const ScheduleMatrix& action);
  /// Measures a schedule without changing the deployed one.
  SimResult evaluate(const ScheduleMatrix& schedule);

  std::uint64_t deployments() const noexcept { return counter_; }

 private:
  TopologySpec scaled_topology() const;

  TopologySpec topology_;
  ClusterSpec cluster_;
  SimConfig sim_;
  std::vector<double> nominal_workload_;
  double workload_scale_ = 1.0;
  ScheduleMatrix schedule_;
  std::uint64_t counter_ = 0;
};

/// Negative average end-to-end time in seconds.
double reward_from_measurement(const SimResult& result);

}  // namespace streamsched
