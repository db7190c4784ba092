#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace streamsched {

enum class ComponentKind { kSource, kProcessingUnit };
enum class Grouping { kShuffle, kFields, kAll, kGlobal };

struct Component {
  std::string id;
  ComponentKind kind = ComponentKind::kProcessingUnit;
  int executor_count = 1;
  double service_time_mean = 0.0;  // seconds per tuple
};

struct Edge {
  std::string from;
  std::string to;
  Grouping grouping = Grouping::kShuffle;
};

/// Application graph plus the workload it is driven with. Threads are
/// numbered by component declaration order, then executor index.
struct TopologySpec {
  std::vector<Component> components;
  std::vector<Edge> edges;
  std::map<std::string, double> source_rates;  // tuples per second

  int total_executors() const;
  std::optional<std::size_t> component_index(const std::string& id) const;
  /// First thread id owned by each component; size = components.size() + 1.
  std::vector<int> executor_offsets() const;
  /// Source components in declaration order; this is the workload-vector order.
  std::vector<std::size_t> source_indices() const;
  /// Source rates laid out in workload-vector order (missing entries are 0).
  std::vector<double> workload() const;
};

struct ClusterSpec {
  int machine_count = 1;
  int slots_per_machine = 1;
  double intra_machine_delay = 0.0;  // seconds
  double inter_machine_delay = 0.0;  // seconds
  double machine_capacity = 1.0;     // concurrently full-speed executors
  int max_threads_per_process = 0;   // 0 = unbounded
  /// Relative processing speed per machine; empty means every machine runs at 1.0.
  std::vector<double> machine_speeds;

  double machine_speed(int machine) const {
    return machine_speeds.empty() ? 1.0 : machine_speeds.at(static_cast<std::size_t>(machine));
  }
};

/// Binary thread-to-machine assignment with exactly one machine per thread.
/// Stored as the machine index per row, so row-sum-1 holds by construction.
class ScheduleMatrix {
 public:
  ScheduleMatrix() = default;
  ScheduleMatrix(std::vector<int> machine_of_thread, int machine_count);

  int threads() const noexcept { return static_cast<int>(assignment_.size()); }
  int machines() const noexcept { return machine_count_; }
  int machine_of(int thread) const { return assignment_.at(static_cast<std::size_t>(thread)); }
  int at(int thread, int machine) const { return machine_of(thread) == machine ? 1 : 0; }
  std::span<const int> assignment() const noexcept { return assignment_; }

  /// Copy with one row moved to another machine.
  ScheduleMatrix with_move(int thread, int machine) const;
  /// Per-machine thread counts.
  std::vector<int> loads() const;
  /// Row-major N*M 0/1 values.
  std::vector<double> flatten() const;

  friend bool operator==(const ScheduleMatrix&, const ScheduleMatrix&) = default;
  friend auto operator<=>(const ScheduleMatrix& a, const ScheduleMatrix& b) {
    return a.assignment_ <=> b.assignment_;
  }

 private:
  std::vector<int> assignment_;
  int machine_count_ = 0;
};

struct SystemState {
  ScheduleMatrix schedule;
  std::vector<double> workload;  // one entry per source component
};

/// Throws Error with kCycleDetected, kDanglingEdge, kZeroExecutors or
/// kInvalidTopology naming the offending component or edge.
void validate_topology(const TopologySpec& spec);
void validate_cluster(const ClusterSpec& cluster);
/// Throws kSlotCapacityExceeded when a machine hosts more threads than its
/// slots can hold (only binding when max_threads_per_process > 0).
void check_slot_capacity(const ScheduleMatrix& schedule, const ClusterSpec& cluster);

/// Storm's default: threads in declaration order dealt cyclically to machines.
ScheduleMatrix round_robin_schedule(const TopologySpec& spec, const ClusterSpec& cluster);

/// Thread ids whose machine differs between the two schedules, ascending.
std::vector<int> schedule_diff(const ScheduleMatrix& old_schedule,
                               const ScheduleMatrix& new_schedule);

std::string to_string(ComponentKind kind);
std::string to_string(Grouping grouping);
ComponentKind component_kind_from_string(const std::string& s);
Grouping grouping_from_string(const std::string& s);

}  // namespace streamsched
