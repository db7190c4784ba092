#include "streamsched/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>

#include <nlohmann/json.hpp>

#include "streamsched/rng.hpp"
#include "streamsched/error.hpp"

namespace streamsched {
namespace {

enum class EventKind : std::uint8_t { kEmit, kArrive, kMachineDone };

struct Event {
  double time;
  std::uint64_t seq;
  EventKind kind;
  std::uint32_t a;
  std::uint32_t b;
};

struct EventLater {
  bool operator()(const Event& x, const Event& y) const {
    if (x.time != y.time) return x.time > y.time;
    return x.seq > y.seq;
  }
};

struct OutEdge {
  std::size_t target;
  Grouping grouping;
  std::uint64_t salt;
};

struct Executor {
  std::size_t component = 0;
  int machine = 0;
  bool busy = false;
  std::uint32_t current = 0;
  std::deque<std::uint32_t> queue;
};

struct Work {
  double finish_v;
  std::uint32_t executor;
  bool operator>(const Work& o) const {
    if (finish_v != o.finish_v) return finish_v > o.finish_v;
    return executor > o.executor;
  }
};

// Processor sharing: every busy executor on the machine advances at the same
// speed factor * min(1, capacity / busy), so one virtual clock tracks all of them.
struct Machine {
  double factor = 1.0;
  int busy = 0;
  double vclock = 0.0;
  double last_time = 0.0;
  std::uint32_t version = 0;
  double busy_integral = 0.0;
  std::priority_queue<Work, std::vector<Work>, std::greater<>> running;
};

struct Root {
  double emit_time = 0.0;
  std::uint64_t key = 0;
  int outstanding = 0;
  int sample = -1;
};

class Engine {
 public:
  Engine(const TopologySpec& spec, const ClusterSpec& cluster, const ScheduleMatrix& schedule,
         const SimConfig& config)
      : spec_(spec), cluster_(cluster), config_(config), rng_(config.seed) {
    const auto offsets = spec.executor_offsets();
    offsets_ = offsets;
    executors_.resize(static_cast<std::size_t>(spec.total_executors()));
    for (std::size_t c = 0; c < spec.components.size(); ++c) {
      for (int e = offsets[c]; e < offsets[c + 1]; ++e) {
        auto& ex = executors_[static_cast<std::size_t>(e)];
        ex.component = c;
        ex.machine = schedule.machine_of(e);
      }
    }
    out_edges_.resize(spec.components.size());
    for (std::size_t i = 0; i < spec.edges.size(); ++i) {
      const auto& e = spec.edges[i];
      auto from = *spec.component_index(e.from);
      auto to = *spec.component_index(e.to);
      out_edges_[from].push_back({to, e.grouping, splitmix64(0x5eed0000ULL + i)});
    }
    machines_.resize(static_cast<std::size_t>(cluster.machine_count));
    for (std::size_t m = 0; m < cluster.machine_speeds.size(); ++m) {
      machines_[m].factor = cluster.machine_speeds[m];
    }
    window_start_ = config.warmup_duration;
    window_end_ = config.warmup_duration + config.measure_duration;
    slice_ = config.measure_duration / config.measurement_samples;
    sample_sum_.assign(static_cast<std::size_t>(config.measurement_samples), 0.0);
    sample_count_.assign(static_cast<std::size_t>(config.measurement_samples), 0);
    round_robin_cursor_.assign(spec.components.size(), 0);
  }

  SimResult run() {
    const auto workload = spec_.workload();
    const auto sources = spec_.source_indices();
    rates_.assign(spec_.components.size(), 0.0);
    for (std::size_t k = 0; k < sources.size(); ++k) {
      rates_[sources[k]] = workload[k];
      if (workload[k] > 0.0) {
        push(first_interarrival(workload[k]), EventKind::kEmit,
             static_cast<std::uint32_t>(sources[k]), 0);
      }
    }

    while (!events_.empty()) {
      Event ev = events_.top();
      events_.pop();
      now_ = ev.time;
      if (now_ >= window_end_ && measured_pending_ == 0) break;
      switch (ev.kind) {
        case EventKind::kEmit: on_emit(ev.a); break;
        case EventKind::kArrive: on_arrive(ev.a, ev.b); break;
        case EventKind::kMachineDone: on_machine_done(ev.a, ev.b); break;
      }
    }
    return collect();
  }

 private:
  double speed(const Machine& m) const {
    if (m.busy <= 0) return 0.0;
    return m.factor * std::min(1.0, cluster_.machine_capacity / m.busy);
  }

  void push(double t, EventKind kind, std::uint32_t a, std::uint32_t b) {
    events_.push(Event{t, seq_++, kind, a, b});
  }

  double first_interarrival(double rate) {
    if (config_.arrival_process == ArrivalProcess::kPeriodic) return 1.0 / rate;
    return exponential(rng_, 1.0 / rate);
  }

  double service_work(std::size_t component) {
    const double mean = spec_.components[component].service_time_mean;
    if (config_.service_time_distribution == ServiceDistribution::kDeterministic) return mean;
    return exponential(rng_, mean);
  }

  double network_delay(int from_machine, int to_machine) const {
    return from_machine == to_machine ? cluster_.intra_machine_delay
                                      : cluster_.inter_machine_delay;
  }

  void advance(Machine& m) {
    const double dt = now_ - m.last_time;
    if (dt > 0.0 && m.busy > 0) {
      m.vclock += dt * speed(m);
      const double lo = std::max(m.last_time, window_start_);
      const double hi = std::min(now_, window_end_);
      if (hi > lo) {
        m.busy_integral += (hi - lo) * std::min<double>(m.busy, cluster_.machine_capacity) /
                           cluster_.machine_capacity;
      }
    }
    m.last_time = now_;
  }

  void reschedule(std::uint32_t machine_id) {
    auto& m = machines_[machine_id];
    ++m.version;
    if (m.running.empty()) return;
    const double remaining = std::max(0.0, m.running.top().finish_v - m.vclock);
    push(now_ + remaining / speed(m), EventKind::kMachineDone, machine_id, m.version);
  }

  void start_service(std::uint32_t executor_id, std::uint32_t root) {
    auto& ex = executors_[executor_id];
    auto& m = machines_[static_cast<std::size_t>(ex.machine)];
    ex.busy = true;
    ex.current = root;
    ++m.busy;
    m.running.push(Work{m.vclock + service_work(ex.component), executor_id});
  }

  std::uint32_t new_root() {
    std::uint32_t id;
    if (!free_roots_.empty()) {
      id = free_roots_.back();
      free_roots_.pop_back();
    } else {
      id = static_cast<std::uint32_t>(roots_.size());
      roots_.emplace_back();
    }
    return id;
  }

  void on_emit(std::uint32_t component) {
    if (now_ >= window_end_) {
      // Keep load stationary only while measured roots are still in flight.
      if (measured_pending_ == 0) return;
    }
    const std::uint32_t r = new_root();
    auto& root = roots_[r];
    root.emit_time = now_;
    root.key = rng_();
    root.outstanding = 1;
    root.sample = -1;
    if (now_ >= window_start_ && now_ < window_end_) {
      int idx = static_cast<int>((now_ - window_start_) / slice_);
      root.sample = std::clamp(idx, 0, config_.measurement_samples - 1);
      ++measured_pending_;
    }

    const int first = offsets_[component];
    const int count = offsets_[component + 1] - first;
    int pick;
    if (config_.arrival_process == ArrivalProcess::kPeriodic) {
      pick = round_robin_cursor_[component]++ % count;
    } else {
      pick = static_cast<int>(uniform_index(rng_, static_cast<std::uint64_t>(count)));
    }
    on_arrive(static_cast<std::uint32_t>(first + pick), r);

    const double rate = rates_[component];
    const double gap = config_.arrival_process == ArrivalProcess::kPeriodic
                           ? 1.0 / rate
                           : exponential(rng_, 1.0 / rate);
    push(now_ + gap, EventKind::kEmit, component, 0);
  }

  void on_arrive(std::uint32_t executor_id, std::uint32_t root) {
    auto& ex = executors_[executor_id];
    if (ex.busy) {
      ex.queue.push_back(root);
      if (ex.queue.size() > config_.queue_cap) {
        throw Error(ErrorCode::kUnstableSystem,
                    "executor " + std::to_string(executor_id) + " backlog exceeded " +
                        std::to_string(config_.queue_cap) + " tuples at t=" +
                        std::to_string(now_) + "s");
      }
      return;
    }
    const auto machine_id = static_cast<std::uint32_t>(ex.machine);
    advance(machines_[machine_id]);
    start_service(executor_id, root);
    reschedule(machine_id);
  }

  void on_machine_done(std::uint32_t machine_id, std::uint32_t version) {
    auto& m = machines_[machine_id];
    if (version != m.version) return;
    advance(m);
    const Work done = m.running.top();
    m.running.pop();
    m.vclock = std::max(m.vclock, done.finish_v);
    --m.busy;

    auto& ex = executors_[done.executor];
    ex.busy = false;
    const std::uint32_t root = ex.current;
    forward(ex, root);
    if (!ex.queue.empty()) {
      const std::uint32_t next = ex.queue.front();
      ex.queue.pop_front();
      start_service(done.executor, next);
    }
    reschedule(machine_id);
  }

  void send(const Executor& from, int target_executor, std::uint32_t root) {
    const int to_machine = executors_[static_cast<std::size_t>(target_executor)].machine;
    push(now_ + network_delay(from.machine, to_machine), EventKind::kArrive,
         static_cast<std::uint32_t>(target_executor), root);
  }

  void forward(const Executor& ex, std::uint32_t root) {
    auto& r = roots_[root];
    int spawned = 0;
    for (const auto& edge : out_edges_[ex.component]) {
      const int first = offsets_[edge.target];
      const int count = offsets_[edge.target + 1] - first;
      switch (edge.grouping) {
        case Grouping::kShuffle:
          send(ex, first + static_cast<int>(uniform_index(rng_, static_cast<std::uint64_t>(count))),
               root);
          spawned += 1;
          break;
        case Grouping::kFields:
          send(ex, first + static_cast<int>(splitmix64(r.key ^ edge.salt) %
                                            static_cast<std::uint64_t>(count)),
               root);
          spawned += 1;
          break;
        case Grouping::kAll:
          for (int k = 0; k < count; ++k) send(ex, first + k, root);
          spawned += count;
          break;
        case Grouping::kGlobal:
          send(ex, first, root);
          spawned += 1;
          break;
      }
    }
    r.outstanding += spawned - 1;
    if (r.outstanding == 0) complete(root);
  }

  void complete(std::uint32_t root) {
    const auto& r = roots_[root];
    if (r.sample >= 0) {
      sample_sum_[static_cast<std::size_t>(r.sample)] += now_ - r.emit_time;
      ++sample_count_[static_cast<std::size_t>(r.sample)];
      --measured_pending_;
    }
    free_roots_.push_back(root);
  }

  SimResult collect() {
    SimResult result;
    double total = 0.0;
    for (std::size_t s = 0; s < sample_sum_.size(); ++s) {
      if (sample_count_[s] == 0) continue;
      const double avg = sample_sum_[s] / static_cast<double>(sample_count_[s]);
      result.per_sample_averages.push_back(avg);
      total += avg;
      result.tuples_completed += sample_count_[s];
    }
    if (!result.per_sample_averages.empty()) {
      result.avg_tuple_processing_time =
          total / static_cast<double>(result.per_sample_averages.size());
    }
    // Close the utilization integral at the end of the window.
    const double span = window_end_ - window_start_;
    now_ = std::max(now_, window_end_);
    for (auto& m : machines_) {
      advance(m);
      result.per_machine_utilization.push_back(
          span > 0.0 ? std::clamp(m.busy_integral / span, 0.0, 1.0) : 0.0);
    }
    return result;
  }

  const TopologySpec& spec_;
  const ClusterSpec& cluster_;
  const SimConfig& config_;
  Rng rng_;

  std::vector<int> offsets_;
  std::vector<Executor> executors_;
  std::vector<std::vector<OutEdge>> out_edges_;
  std::vector<Machine> machines_;
  std::vector<double> rates_;
  std::vector<int> round_robin_cursor_;

  std::vector<Root> roots_;
  std::vector<std::uint32_t> free_roots_;
  std::priority_queue<Event, std::vector<Event>, EventLater> events_;
  std::uint64_t seq_ = 0;
  double now_ = 0.0;

  double window_start_ = 0.0;
  double window_end_ = 0.0;
  double slice_ = 0.0;
  std::uint64_t measured_pending_ = 0;
  std::vector<double> sample_sum_;
  std::vector<std::uint64_t> sample_count_;
};

}  // namespace

void validate_sim_config(const SimConfig& config) {
  if (!(config.warmup_duration >= 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "warmup-duration must be >= 0");
  }
  if (!(config.measure_duration > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "measure-duration must be > 0");
  }
  if (config.measurement_samples < 1) {
    throw Error(ErrorCode::kInvalidConfig, "measurement-samples must be >= 1");
  }
  if (!(config.sample_interval > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "sample-interval must be > 0");
  }
  if (config.queue_cap < 1) throw Error(ErrorCode::kInvalidConfig, "queue-cap must be >= 1");
}

SimResult simulate(const TopologySpec& spec, const ClusterSpec& cluster,
                   const ScheduleMatrix& schedule, const SimConfig& config) {
  validate_sim_config(config);
  if (schedule.threads() != spec.total_executors() ||
      schedule.machines() != cluster.machine_count) {
    throw Error(ErrorCode::kDimensionMismatch,
                "schedule is " + std::to_string(schedule.threads()) + "x" +
                    std::to_string(schedule.machines()) + ", expected " +
                    std::to_string(spec.total_executors()) + "x" +
                    std::to_string(cluster.machine_count));
  }
  check_slot_capacity(schedule, cluster);
  Engine engine(spec, cluster, schedule, config);
  return engine.run();
}

SimResult measure_after_stabilization(const TopologySpec& spec, const ClusterSpec& cluster,
                                      const ScheduleMatrix& schedule, const SimConfig& config) {
  SimConfig protocol = config;
  protocol.measure_duration = config.sample_interval * config.measurement_samples;
  return simulate(spec, cluster, schedule, protocol);
}

nlohmann::json to_json(const SimResult& result) {
  return nlohmann::json{
      {"avg_tuple_processing_time", result.avg_tuple_processing_time},
      {"per_sample_averages", result.per_sample_averages},
      {"tuples_completed", result.tuples_completed},
      {"per_machine_utilization", result.per_machine_utilization},
  };
}

SimResult sim_result_from_json(const nlohmann::json& j) {
  SimResult r;
  r.avg_tuple_processing_time = j.at("avg_tuple_processing_time").get<double>();
  r.per_sample_averages = j.at("per_sample_averages").get<std::vector<double>>();
  r.tuples_completed = j.at("tuples_completed").get<std::uint64_t>();
  r.per_machine_utilization = j.at("per_machine_utilization").get<std::vector<double>>();
  return r;
}

}  // namespace streamsched
