#include "streamsched/topology.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "streamsched/error.hpp"

namespace streamsched {

int TopologySpec::total_executors() const {
  int n = 0;
  for (const auto& c : components) n += c.executor_count;
  return n;
}

std::optional<std::size_t> TopologySpec::component_index(const std::string& id) const {
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (components[i].id == id) return i;
  }
  return std::nullopt;
}

std::vector<int> TopologySpec::executor_offsets() const {
  std::vector<int> offsets(components.size() + 1, 0);
  for (std::size_t i = 0; i < components.size(); ++i) {
    offsets[i + 1] = offsets[i] + components[i].executor_count;
  }
  return offsets;
}

std::vector<std::size_t> TopologySpec::source_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (components[i].kind == ComponentKind::kSource) out.push_back(i);
  }
  return out;
}

std::vector<double> TopologySpec::workload() const {
  std::vector<double> w;
  for (auto idx : source_indices()) {
    auto it = source_rates.find(components[idx].id);
    w.push_back(it == source_rates.end() ? 0.0 : it->second);
  }
  return w;
}

ScheduleMatrix::ScheduleMatrix(std::vector<int> machine_of_thread, int machine_count)
    : assignment_(std::move(machine_of_thread)), machine_count_(machine_count) {
  if (machine_count_ < 1) {
    throw Error(ErrorCode::kDimensionMismatch, "schedule needs at least one machine");
  }
  for (std::size_t i = 0; i < assignment_.size(); ++i) {
    if (assignment_[i] < 0 || assignment_[i] >= machine_count_) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "thread " + std::to_string(i) + " assigned to machine " +
                      std::to_string(assignment_[i]) + " outside [0, " +
                      std::to_string(machine_count_) + ")");
    }
  }
}

ScheduleMatrix ScheduleMatrix::with_move(int thread, int machine) const {
  auto next = assignment_;
  next.at(static_cast<std::size_t>(thread)) = machine;
  return ScheduleMatrix(std::move(next), machine_count_);
}

std::vector<int> ScheduleMatrix::loads() const {
  std::vector<int> out(static_cast<std::size_t>(machine_count_), 0);
  for (int m : assignment_) ++out[static_cast<std::size_t>(m)];
  return out;
}

std::vector<double> ScheduleMatrix::flatten() const {
  std::vector<double> out(assignment_.size() * static_cast<std::size_t>(machine_count_), 0.0);
  for (std::size_t i = 0; i < assignment_.size(); ++i) {
    out[i * static_cast<std::size_t>(machine_count_) + static_cast<std::size_t>(assignment_[i])] = 1.0;
  }
  return out;
}

void validate_topology(const TopologySpec& spec) {
  if (spec.components.empty()) {
    throw Error(ErrorCode::kInvalidTopology, "topology has no components");
  }
  std::set<std::string> ids;
  for (const auto& c : spec.components) {
    if (!ids.insert(c.id).second) {
      throw Error(ErrorCode::kInvalidTopology, "duplicate component '" + c.id + "'");
    }
    if (c.executor_count < 1) {
      throw Error(ErrorCode::kZeroExecutors, "component '" + c.id + "' has executor-count " +
                                                 std::to_string(c.executor_count));
    }
    if (!std::isfinite(c.service_time_mean) || c.service_time_mean < 0.0) {
      throw Error(ErrorCode::kInvalidTopology,
                  "component '" + c.id + "' has invalid service-time-mean");
    }
  }

  const std::size_t n = spec.components.size();
  std::vector<std::vector<std::size_t>> out(n);
  std::vector<int> indegree(n, 0);
  for (const auto& e : spec.edges) {
    auto from = spec.component_index(e.from);
    auto to = spec.component_index(e.to);
    if (!from || !to) {
      throw Error(ErrorCode::kDanglingEdge, "edge '" + e.from + "' -> '" + e.to +
                                                "' references an unknown component");
    }
    if (*from == *to) {
      throw Error(ErrorCode::kCycleDetected, "self-loop on '" + e.from + "'");
    }
    out[*from].push_back(*to);
    ++indegree[*to];
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (spec.components[i].kind == ComponentKind::kSource && indegree[i] > 0) {
      throw Error(ErrorCode::kInvalidTopology,
                  "source '" + spec.components[i].id + "' has incoming edges");
    }
  }

  // Kahn's algorithm; whatever remains afterwards sits on a cycle.
  std::vector<int> remaining = indegree;
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (remaining[i] == 0) ready.push_back(i);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    auto u = ready.back();
    ready.pop_back();
    ++visited;
    for (auto v : out[u]) {
      if (--remaining[v] == 0) ready.push_back(v);
    }
  }
  if (visited != n) {
    for (std::size_t i = 0; i < n; ++i) {
      if (remaining[i] > 0) {
        throw Error(ErrorCode::kCycleDetected,
                    "component '" + spec.components[i].id + "' lies on a cycle");
      }
    }
  }

  std::vector<bool> reached(n, false);
  std::vector<std::size_t> stack = spec.source_indices();
  if (stack.empty()) throw Error(ErrorCode::kInvalidTopology, "topology has no source");
  for (auto s : stack) reached[s] = true;
  while (!stack.empty()) {
    auto u = stack.back();
    stack.pop_back();
    for (auto v : out[u]) {
      if (!reached[v]) {
        reached[v] = true;
        stack.push_back(v);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!reached[i]) {
      throw Error(ErrorCode::kInvalidTopology,
                  "component '" + spec.components[i].id + "' is unreachable from any source");
    }
  }

  for (const auto& [id, rate] : spec.source_rates) {
    auto idx = spec.component_index(id);
    if (!idx || spec.components[*idx].kind != ComponentKind::kSource) {
      throw Error(ErrorCode::kInvalidTopology, "source rate given for non-source '" + id + "'");
    }
    if (!std::isfinite(rate) || rate < 0.0) {
      throw Error(ErrorCode::kInvalidTopology, "source '" + id + "' has a negative rate");
    }
  }
}

void validate_cluster(const ClusterSpec& cluster) {
  if (cluster.machine_count < 1) throw Error(ErrorCode::kInvalidCluster, "machine-count < 1");
  if (cluster.slots_per_machine < 1) throw Error(ErrorCode::kInvalidCluster, "slots-per-machine < 1");
  if (!(cluster.intra_machine_delay >= 0.0) ||
      !(cluster.intra_machine_delay <= cluster.inter_machine_delay)) {
    throw Error(ErrorCode::kInvalidCluster,
                "require 0 <= intra-machine-delay <= inter-machine-delay");
  }
  if (!(cluster.machine_capacity > 0.0)) {
    throw Error(ErrorCode::kInvalidCluster, "machine-capacity must be positive");
  }
  if (cluster.max_threads_per_process < 0) {
    throw Error(ErrorCode::kInvalidCluster, "max-threads-per-process must be >= 0");
  }
  if (!cluster.machine_speeds.empty()) {
    if (cluster.machine_speeds.size() != static_cast<std::size_t>(cluster.machine_count)) {
      throw Error(ErrorCode::kInvalidCluster, "machine-speeds needs one entry per machine");
    }
    for (double s : cluster.machine_speeds) {
      if (!(s > 0.0) || !std::isfinite(s)) {
        throw Error(ErrorCode::kInvalidCluster, "machine speeds must be positive and finite");
      }
    }
  }
}

void check_slot_capacity(const ScheduleMatrix& schedule, const ClusterSpec& cluster) {
  if (cluster.max_threads_per_process <= 0) return;
  const int cap = cluster.slots_per_machine * cluster.max_threads_per_process;
  auto loads = schedule.loads();
  for (std::size_t m = 0; m < loads.size(); ++m) {
    if (loads[m] > cap) {
      throw Error(ErrorCode::kSlotCapacityExceeded,
                  "machine " + std::to_string(m) + " hosts " + std::to_string(loads[m]) +
                      " threads, capacity " + std::to_string(cap));
    }
  }
}

ScheduleMatrix round_robin_schedule(const TopologySpec& spec, const ClusterSpec& cluster) {
  const int n = spec.total_executors();
  std::vector<int> assignment(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) assignment[static_cast<std::size_t>(i)] = i % cluster.machine_count;
  return ScheduleMatrix(std::move(assignment), cluster.machine_count);
}

std::vector<int> schedule_diff(const ScheduleMatrix& old_schedule,
                               const ScheduleMatrix& new_schedule) {
  if (old_schedule.threads() != new_schedule.threads() ||
      old_schedule.machines() != new_schedule.machines()) {
    throw Error(ErrorCode::kDimensionMismatch, "schedules have different shapes");
  }
  std::vector<int> moved;
  for (int i = 0; i < old_schedule.threads(); ++i) {
    if (old_schedule.machine_of(i) != new_schedule.machine_of(i)) moved.push_back(i);
  }
  return moved;
}

std::string to_string(ComponentKind kind) {
  return kind == ComponentKind::kSource ? "source" : "processing-unit";
}

std::string to_string(Grouping grouping) {
  switch (grouping) {
    case Grouping::kShuffle: return "shuffle";
    case Grouping::kFields: return "fields";
    case Grouping::kAll: return "all";
    case Grouping::kGlobal: return "global";
  }
  return "shuffle";
}

ComponentKind component_kind_from_string(const std::string& s) {
  if (s == "source") return ComponentKind::kSource;
  if (s == "processing-unit") return ComponentKind::kProcessingUnit;
  throw Error(ErrorCode::kInvalidTopology, "unknown component kind '" + s + "'");
}

Grouping grouping_from_string(const std::string& s) {
  if (s == "shuffle") return Grouping::kShuffle;
  if (s == "fields") return Grouping::kFields;
  if (s == "all") return Grouping::kAll;
  if (s == "global") return Grouping::kGlobal;
  throw Error(ErrorCode::kInvalidTopology, "unknown grouping '" + s + "'");
}

}  // namespace streamsched
