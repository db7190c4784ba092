#pragma once

#include <cstdint>

#include "streamsched/agent_config.hpp"

namespace streamsched {

/// Maps measured rewards to the values used in Bellman targets:
/// reward_scale * (r - running mean) when centering is on, else reward_scale * r.
/// Shifting every reward by one constant leaves the greedy policy unchanged.
class RewardShaper {
 public:
  RewardShaper() = default;
  RewardShaper(double scale, bool center) : scale_(scale), center_(center) {}
  explicit RewardShaper(const AgentConfig& c) : RewardShaper(c.reward_scale, c.center_rewards) {}

  void observe(double reward) {
    ++count_;
    mean_ += (reward - mean_) / static_cast<double>(count_);
  }

  double operator()(double reward) const {
    return scale_ * (center_ ? reward - mean_ : reward);
  }

  double mean() const noexcept { return mean_; }
  std::uint64_t count() const noexcept { return count_; }
  void restore(double mean, std::uint64_t count) {
    mean_ = mean;
    count_ = count;
  }

 private:
  double scale_ = 1.0;
  bool center_ = false;
  double mean_ = 0.0;
  std::uint64_t count_ = 0;
};

}  // namespace streamsched
