#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "streamsched/topology.hpp"

namespace streamsched {

enum class ServiceDistribution { kDeterministic, kExponential };
enum class ArrivalProcess { kPoisson, kPeriodic };

struct SimConfig {
  std::uint64_t seed = 1;
  double warmup_duration = 60.0;  // simulated seconds
  double measure_duration = 50.0;
  int measurement_samples = 5;
  double sample_interval = 10.0;
  ServiceDistribution service_time_distribution = ServiceDistribution::kExponential;
  ArrivalProcess arrival_process = ArrivalProcess::kPoisson;
  std::size_t queue_cap = 100000;  // per-executor backlog that signals overload
};

struct SimResult {
  double avg_tuple_processing_time = 0.0;  // seconds
  std::vector<double> per_sample_averages;
  std::uint64_t tuples_completed = 0;
  std::vector<double> per_machine_utilization;
};

void validate_sim_config(const SimConfig& config);

/// Runs the event-driven cluster model. Sources emit root tuples, every hop
/// costs queueing + processor-shared service + network delay, and a root's
/// end-to-end time runs from emission until its whole descendant tree has
/// completed. Roots emitted inside [warmup, warmup + measure_duration) are
/// measured; that window is split into measurement_samples equal slices and
/// each non-empty slice contributes one sample average.
///
/// Throws kDimensionMismatch, kSlotCapacityExceeded, kUnstableSystem.
SimResult simulate(const TopologySpec& spec, const ClusterSpec& cluster,
                   const ScheduleMatrix& schedule, const SimConfig& config);

/// Re-stabilization protocol: warm up, then take measurement_samples
/// consecutive samples spaced sample_interval apart and average them.
SimResult measure_after_stabilization(const TopologySpec& spec, const ClusterSpec& cluster,
                                      const ScheduleMatrix& schedule, const SimConfig& config);

nlohmann::json to_json(const SimResult& result);
SimResult sim_result_from_json(const nlohmann::json& j);

}  // namespace streamsched
