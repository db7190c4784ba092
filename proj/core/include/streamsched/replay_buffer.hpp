#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <numeric>
#include <vector>

#include "streamsched/error.hpp"
#include "streamsched/rng.hpp"
#include "streamsched/topology.hpp"

namespace streamsched {

struct TransitionSample {
  SystemState state;
  ScheduleMatrix action;
  double reward = 0.0;  // negative seconds
  SystemState next_state;
  int action_index = -1;  // discrete index for restricted action spaces
};

/// Bounded FIFO of transitions; a push into a full buffer evicts the oldest.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 1000) : capacity_(capacity) {
    if (capacity_ == 0) throw Error(ErrorCode::kInvalidConfig, "replay capacity must be >= 1");
  }

  void push(TransitionSample sample) {
    if (samples_.size() == capacity_) samples_.pop_front();
    samples_.push_back(std::move(sample));
  }

  /// H distinct samples drawn uniformly (partial Fisher-Yates).
  std::vector<const TransitionSample*> sample(std::size_t h, Rng& rng) const {
    if (samples_.size() < h) {
      throw Error(ErrorCode::kInsufficientSamples, "buffer holds " +
                                                       std::to_string(samples_.size()) +
                                                       " samples, mini-batch needs " +
                                                       std::to_string(h));
    }
    std::vector<std::size_t> idx(samples_.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::vector<const TransitionSample*> out;
    out.reserve(h);
    for (std::size_t i = 0; i < h; ++i) {
      const auto j = i + static_cast<std::size_t>(uniform_index(rng, idx.size() - i));
      std::swap(idx[i], idx[j]);
      out.push_back(&samples_[idx[i]]);
    }
    return out;
  }

  std::size_t size() const noexcept { return samples_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  bool empty() const noexcept { return samples_.empty(); }
  const TransitionSample& operator[](std::size_t i) const { return samples_.at(i); }

 private:
  std::size_t capacity_;
  std::deque<TransitionSample> samples_;
};

}  // namespace streamsched
