#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "streamsched/environment.hpp"
#include "streamsched/episode.hpp"

namespace streamsched {

/// What the experiment runner needs from a learning scheduler.
class LearningAgent {
 public:
  virtual ~LearningAgent() = default;
  virtual std::string name() const = 0;
  virtual void pretrain_offline(SchedulingEnvironment& env, int samples) = 0;
  virtual EpisodeLog run_online(SchedulingEnvironment& env, int epochs,
                                const std::vector<WorkloadStep>& workload_steps) = 0;
  virtual nlohmann::json checkpoint() const = 0;
};

}  // namespace streamsched
