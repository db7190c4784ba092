#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "streamsched/episode.hpp"

namespace streamsched {

/// Fraction of an episode log, counted from the end, that is averaged into
/// the stabilized value.
inline constexpr double kStabilizedTailFraction = 0.25;

struct NormalizedSeries {
  std::vector<double> values;
  bool degenerate_range = false;  // r_max == r_min, values are all zero
};

/// (r - r_min) / (r_max - r_min). Throws kInvalidConfig on an empty series.
NormalizedSeries normalize_rewards(std::span<const double> series);

/// Moving average of odd `window` run forward then backward, on a series
/// padded by mirror reflection so the output keeps the input length and sum.
/// Throws kBadWindow unless window is odd and in [1, series.size()].
std::vector<double> smooth_zero_phase(std::span<const double> series, int window);

/// Mean of the last quarter (at least one value) of the series.
double stabilized_average(std::span<const double> series);
double stabilized_average(const EpisodeLog& log);

/// What a finished run reports about itself; enough to compare two runs.
struct RunSummary {
  std::string scenario;
  std::string scheduler;
  nlohmann::json sim;  // measurement protocol the run used
  double stabilized_average = 0.0;  // seconds
};

/// 100 * (b - a) / b: how much faster run a settles than run b, in percent.
/// Throws kScenarioMismatch when the runs used different scenarios or
/// measurement protocols.
double compare_report(const RunSummary& a, const RunSummary& b);

}  // namespace streamsched
