#include "streamsched/environment.hpp"

#include "streamsched/error.hpp"
#include "streamsched/rng.hpp"

namespace streamsched {

SchedulingEnvironment::SchedulingEnvironment(TopologySpec topology, ClusterSpec cluster,
                                             SimConfig sim)
    : topology_(std::move(topology)), cluster_(std::move(cluster)), sim_(sim) {
  validate_topology(topology_);
  validate_cluster(cluster_);
  validate_sim_config(sim_);
  nominal_workload_ = topology_.workload();
  schedule_ = round_robin_schedule(topology_, cluster_);
}

std::vector<double> SchedulingEnvironment::workload() const {
  auto w = nominal_workload_;
  for (auto& x : w) x *= workload_scale_;
  return w;
}

void SchedulingEnvironment::set_workload_scale(double scale) {
  if (!(scale >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "workload scale must be >= 0");
  workload_scale_ = scale;
}

void SchedulingEnvironment::reset(const ScheduleMatrix& schedule) {
  if (schedule.threads() != threads() || schedule.machines() != machines()) {
    throw Error(ErrorCode::kDimensionMismatch, "reset schedule has the wrong shape");
  }
  schedule_ = schedule;
}

TopologySpec SchedulingEnvironment::scaled_topology() const {
  TopologySpec t = topology_;
  for (auto& [id, rate] : t.source_rates) rate *= workload_scale_;
  return t;
}

SchedulingEnvironment::Step SchedulingEnvironment::deploy(const ScheduleMatrix& action) {
  Step step;
  step.moved_threads = schedule_diff(schedule_, action);
  step.result = evaluate(action);
  step.reward = reward_from_measurement(step.result);
  schedule_ = action;
  return step;
}

SimResult SchedulingEnvironment::evaluate(const ScheduleMatrix& schedule) {
  SimConfig cfg = sim_;
  cfg.seed = derive_seed(sim_.seed, counter_++);
  return measure_after_stabilization(scaled_topology(), cluster_, schedule, cfg);
}

double reward_from_measurement(const SimResult& result) {
  return -result.avg_tuple_processing_time;
}

}  // namespace streamsched
