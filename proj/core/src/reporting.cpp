#include "streamsched/reporting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "streamsched/error.hpp"

namespace streamsched {

NormalizedSeries normalize_rewards(std::span<const double> series) {
  if (series.empty()) throw Error(ErrorCode::kInvalidConfig, "cannot normalize an empty series");
  const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  const double r_min = *lo;
  const double r_max = *hi;
  NormalizedSeries out;
  out.values.resize(series.size(), 0.0);
  if (!(r_max > r_min)) {
    out.degenerate_range = true;
    return out;
  }
  const double range = r_max - r_min;
  for (std::size_t i = 0; i < series.size(); ++i) {
    out.values[i] = std::clamp((series[i] - r_min) / range, 0.0, 1.0);
  }
  return out;
}

std::vector<double> smooth_zero_phase(std::span<const double> series, int window) {
  const auto n = static_cast<std::ptrdiff_t>(series.size());
  if (window < 1 || window % 2 == 0 || window > n) {
    throw Error(ErrorCode::kBadWindow, "smoothing window must be odd and within [1, " +
                                           std::to_string(n) + "], got " + std::to_string(window));
  }
  if (window == 1) return {series.begin(), series.end()};
  const std::ptrdiff_t pad = window - 1;
  const std::ptrdiff_t len = n + 2 * pad;
  // Mirror about the outer sample edges: ... x1 x0 | x0 x1 ... x_{n-1} | x_{n-1} ...
  std::vector<double> padded(static_cast<std::size_t>(len));
  for (std::ptrdiff_t j = 0; j < len; ++j) {
    std::ptrdiff_t i = j - pad;
    if (i < 0) i = -1 - i;
    if (i >= n) i = 2 * n - 1 - i;
    padded[static_cast<std::size_t>(j)] = series[static_cast<std::size_t>(i)];
  }
  const double w = static_cast<double>(window);
  // Forward pass: causal box filter, valid from index window-1.
  std::vector<double> forward(static_cast<std::size_t>(len), 0.0);
  for (std::ptrdiff_t k = window - 1; k < len; ++k) {
    double s = 0.0;
    for (std::ptrdiff_t j = k - window + 1; j <= k; ++j) s += padded[static_cast<std::size_t>(j)];
    forward[static_cast<std::size_t>(k)] = s / w;
  }
  // Backward pass: anti-causal box filter over the forward output.
  std::vector<double> out(static_cast<std::size_t>(n));
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t k = i + pad;
    double s = 0.0;
    for (std::ptrdiff_t j = k; j < k + window; ++j) s += forward[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = s / w;
  }
  return out;
}

double stabilized_average(std::span<const double> series) {
  if (series.empty()) throw Error(ErrorCode::kInvalidConfig, "no measurements to average");
  const auto count = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(kStabilizedTailFraction *
                                            static_cast<double>(series.size()))));
  const auto tail = series.last(count);
  return std::accumulate(tail.begin(), tail.end(), 0.0) / static_cast<double>(count);
}

double stabilized_average(const EpisodeLog& log) {
  std::vector<double> times;
  times.reserve(log.size());
  for (const auto& r : log) times.push_back(r.avg_time_seconds);
  return stabilized_average(times);
}

double compare_report(const RunSummary& a, const RunSummary& b) {
  if (a.scenario != b.scenario || a.sim != b.sim) {
    throw Error(ErrorCode::kScenarioMismatch,
                "runs differ in scenario or measurement protocol ('" + a.scenario + "' vs '" +
                    b.scenario + "')");
  }
  if (!(b.stabilized_average > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "reference run has a non-positive stabilized time");
  }
  return 100.0 * (b.stabilized_average - a.stabilized_average) / b.stabilized_average;
}

}  // namespace streamsched
