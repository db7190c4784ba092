#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "streamsched/error.hpp"
#include "streamsched/reporting.hpp"
#include "streamsched/rng.hpp"

namespace streamsched {
namespace {

std::vector<double> random_series(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = -0.005 + 0.004 * uniform01(rng);
  return v;
}

TEST(Normalize, FormulaExample) {
  const std::vector<double> r{-4.0, -2.0, -1.0};
  const auto n = normalize_rewards(r);
  EXPECT_FALSE(n.degenerate_range);
  EXPECT_DOUBLE_EQ(n.values[1], 2.0 / 3.0);
}

TEST(Normalize, ConstantSeriesIsDegenerate) {
  const std::vector<double> r(5, -0.002);
  const auto n = normalize_rewards(r);
  EXPECT_TRUE(n.degenerate_range);
  for (double v : n.values) EXPECT_EQ(v, 0.0);
}

TEST(Normalize, RangeAndEndpoints) {
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const auto r = random_series(2 + uniform_index(rng, 50), rng);
    const auto n = normalize_rewards(r);
    const auto [lo, hi] = std::minmax_element(n.values.begin(), n.values.end());
    EXPECT_EQ(*lo, 0.0);
    EXPECT_EQ(*hi, 1.0);
  }
  EXPECT_THROW(normalize_rewards(std::vector<double>{}), Error);
}

TEST(Smooth, WindowOneIsIdentity) {
  Rng rng(2);
  const auto r = random_series(30, rng);
  EXPECT_EQ(smooth_zero_phase(r, 1), r);
}

TEST(Smooth, ConstantIsUnchanged) {
  const std::vector<double> r(40, 0.37);
  for (double v : smooth_zero_phase(r, 9)) EXPECT_NEAR(v, 0.37, 1e-15);
}

TEST(Smooth, ImpulseResponseIsSymmetricTriangle) {
  std::vector<double> r(41, 0.0);
  r[20] = 1.0;
  const auto y = smooth_zero_phase(r, 5);
  // Two box filters of width 5 convolve into a triangle of width 9.
  for (int d = 0; d <= 20; ++d) EXPECT_NEAR(y[static_cast<std::size_t>(20 - d)], y[static_cast<std::size_t>(20 + d)], 1e-15);
  for (int d = 0; d < 5; ++d) EXPECT_NEAR(y[static_cast<std::size_t>(20 + d)], (5.0 - d) / 25.0, 1e-15);
  EXPECT_EQ(y[25], 0.0);
}

TEST(Smooth, ReversalSymmetry) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto r = random_series(25 + uniform_index(rng, 30), rng);
    const auto y = smooth_zero_phase(r, 7);
    std::reverse(r.begin(), r.end());
    auto yr = smooth_zero_phase(r, 7);
    std::reverse(yr.begin(), yr.end());
    for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(y[i], yr[i], 1e-15);
  }
}

TEST(Smooth, PreservesMean) {
  Rng rng(4);
  const auto r = random_series(500, rng);
  const auto y = smooth_zero_phase(r, 11);
  ASSERT_EQ(y.size(), r.size());
  const double a = std::accumulate(r.begin(), r.end(), 0.0) / 500.0;
  const double b = std::accumulate(y.begin(), y.end(), 0.0) / 500.0;
  EXPECT_NEAR(a, b, 1e-9);
}

TEST(Smooth, BadWindows) {
  const std::vector<double> r(5, 1.0);
  for (int w : {0, 2, 7, -1}) {
    try {
      smooth_zero_phase(r, w);
      FAIL() << w;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kBadWindow);
    }
  }
  EXPECT_NO_THROW(smooth_zero_phase(r, 5));
}

TEST(Stabilized, LastQuarter) {
  const std::vector<double> r{1, 2, 3, 4, 5, 6, 7, 8};
  EXPECT_DOUBLE_EQ(stabilized_average(r), 7.5);
  EXPECT_DOUBLE_EQ(stabilized_average(std::vector<double>{4.0}), 4.0);
  EXPECT_DOUBLE_EQ(stabilized_average(std::vector<double>{1, 2, 3, 4, 5}), 4.5);
  EpisodeLog log;
  for (int t = 0; t < 4; ++t) log.push_back({t, -0.001 * t, 0.0, 0, 0.001 * t});
  EXPECT_DOUBLE_EQ(stabilized_average(log), 0.003);
}

TEST(Compare, Percentages) {
  const nlohmann::json sim{{"seed", 1}};
  const RunSummary a{"small", "actor-critic", sim, 1.33};
  const RunSummary b{"small", "round-robin", sim, 1.96};
  EXPECT_NEAR(compare_report(a, b), 32.1, 0.05);
  EXPECT_EQ(compare_report(a, a), 0.0);
}

TEST(Compare, Mismatch) {
  const RunSummary a{"small", "actor-critic", nlohmann::json{{"seed", 1}}, 1.33};
  RunSummary b{"large", "round-robin", nlohmann::json{{"seed", 1}}, 1.96};
  try {
    compare_report(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kScenarioMismatch);
  }
  b.scenario = "small";
  b.sim = nlohmann::json{{"seed", 2}};
  EXPECT_THROW(compare_report(a, b), Error);
}

}  // namespace
}  // namespace streamsched
