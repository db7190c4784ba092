#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "streamsched/error.hpp"
#include "streamsched/simulator.hpp"
#include "test_support.hpp"

namespace streamsched {
namespace {

SimConfig deterministic_config(double measure = 20.0) {
  SimConfig c;
  c.seed = 3;
  c.warmup_duration = 1.0;
  c.measure_duration = measure;
  c.measurement_samples = 5;
  c.sample_interval = measure / 5.0;
  c.service_time_distribution = ServiceDistribution::kDeterministic;
  c.arrival_process = ArrivalProcess::kPeriodic;
  return c;
}

TEST(Simulate, DeterministicPipelineSumsServiceTimes) {
  const auto spec = testing::chain({0.0, 0.001, 0.002}, 10.0);
  const auto r = simulate(spec, testing::cluster(1), ScheduleMatrix({0, 0, 0}, 1),
                          deterministic_config());
  EXPECT_NEAR(r.avg_tuple_processing_time, 0.003, 1e-12);
  for (double s : r.per_sample_averages) EXPECT_NEAR(s, 0.003, 1e-12);
}

TEST(Simulate, OneInterMachineHopAddsExactlyTheDelay) {
  const auto spec = testing::chain({0.0, 0.001, 0.002}, 10.0);
  const auto r = simulate(spec, testing::cluster(2, 0.0, 0.001), ScheduleMatrix({0, 0, 1}, 2),
                          deterministic_config());
  EXPECT_NEAR(r.avg_tuple_processing_time, 0.004, 1e-12);
}

TEST(Simulate, IntraMachineDelayChargedBetweenExecutorsOnOneMachine) {
  const auto spec = testing::chain({0.0, 0.001, 0.002}, 10.0);
  const auto r = simulate(spec, testing::cluster(1, 0.0005, 0.001), ScheduleMatrix({0, 0, 0}, 1),
                          deterministic_config());
  EXPECT_NEAR(r.avg_tuple_processing_time, 0.004, 1e-12);
}

TEST(Simulate, MM1SojournMatchesClosedForm) {
  // Source with zero service feeding one exponential server: lambda 50/s, mu 100/s.
  const auto spec = testing::chain({0.0, 0.01}, 50.0);
  SimConfig c;
  c.seed = 17;
  c.warmup_duration = 100.0;
  c.measure_duration = 2100.0;
  c.measurement_samples = 5;
  c.sample_interval = 420.0;
  const auto r = simulate(spec, testing::cluster(1), ScheduleMatrix({0, 0}, 1), c);
  EXPECT_GE(r.tuples_completed, 100000u);
  const double expected = 1.0 / (100.0 - 50.0);
  EXPECT_NEAR(r.avg_tuple_processing_time, expected, 0.1 * expected);
}

TEST(Simulate, AverageIsMeanOfSamplesAndUtilizationIsAFraction) {
  const auto spec = testing::continuous_queries(2, 9, 9, 1500.0);
  SimConfig c;
  c.warmup_duration = 0.2;
  c.measure_duration = 0.5;
  c.sample_interval = 0.1;
  const auto r = simulate(spec, testing::cluster(4, 0.00002, 0.0005, 2.0),
                          ScheduleMatrix(std::vector<int>(20, 1), 4), c);
  ASSERT_EQ(r.per_sample_averages.size(), 5u);
  const double mean = std::accumulate(r.per_sample_averages.begin(), r.per_sample_averages.end(),
                                      0.0) / 5.0;
  EXPECT_NEAR(r.avg_tuple_processing_time, mean, 1e-15);
  ASSERT_EQ(r.per_machine_utilization.size(), 4u);
  for (double u : r.per_machine_utilization) {
    EXPECT_GE(u, 0.0);
    EXPECT_LE(u, 1.0);
  }
  EXPECT_EQ(r.per_machine_utilization[0], 0.0);
  EXPECT_GT(r.per_machine_utilization[1], 0.0);
}

TEST(Simulate, BitIdenticalForEqualSeeds) {
  const auto spec = testing::continuous_queries(2, 9, 9, 1500.0);
  const auto cluster = testing::cluster(4, 0.00002, 0.0005, 2.0);
  const auto sched = round_robin_schedule(spec, cluster);
  SimConfig c;
  c.warmup_duration = 0.1;
  c.measure_duration = 0.3;
  c.sample_interval = 0.06;
  c.seed = 42;
  const auto a = to_json(simulate(spec, cluster, sched, c)).dump();
  const auto b = to_json(simulate(spec, cluster, sched, c)).dump();
  EXPECT_EQ(a, b);
  c.seed = 43;
  EXPECT_NE(a, to_json(simulate(spec, cluster, sched, c)).dump());
}

TEST(Simulate, SimResultJsonRoundTrip) {
  SimResult r;
  r.avg_tuple_processing_time = 0.00123;
  r.per_sample_averages = {0.001, 0.00146};
  r.tuples_completed = 99;
  r.per_machine_utilization = {0.5, 0.25};
  const auto back = sim_result_from_json(to_json(r));
  EXPECT_EQ(back.avg_tuple_processing_time, r.avg_tuple_processing_time);
  EXPECT_EQ(back.per_sample_averages, r.per_sample_averages);
  EXPECT_EQ(back.tuples_completed, r.tuples_completed);
  EXPECT_EQ(back.per_machine_utilization, r.per_machine_utilization);
}

TEST(Simulate, MonotoneInInterMachineDelay) {
  const auto spec = testing::continuous_queries(2, 4, 4, 800.0);
  const auto sched = round_robin_schedule(spec, testing::cluster(3));
  SimConfig c;
  c.warmup_duration = 0.2;
  c.measure_duration = 1.0;
  c.sample_interval = 0.2;
  double previous = 0.0;
  for (double d : {0.0, 0.0002, 0.0005, 0.001, 0.002}) {
    const double t =
        simulate(spec, testing::cluster(3, 0.0, d, 2.0), sched, c).avg_tuple_processing_time;
    EXPECT_GE(t, previous) << "delay " << d;
    previous = t;
  }
}

TEST(Simulate, ColocationIsOptimalAtNegligibleLoad) {
  // Brute force over all 3^4 placements of a 4-stage chain.
  const auto spec = testing::chain({0.0005, 0.001, 0.0005, 0.001}, 1.0);
  const auto cluster = testing::cluster(3, 0.0001, 0.001, 1.0);
  const auto c = deterministic_config(100.0);
  const double colocated =
      simulate(spec, cluster, ScheduleMatrix({1, 1, 1, 1}, 3), c).avg_tuple_processing_time;
  double best = std::numeric_limits<double>::infinity();
  for (int code = 0; code < 81; ++code) {
    std::vector<int> a(4);
    for (int i = 0, x = code; i < 4; ++i, x /= 3) a[static_cast<std::size_t>(i)] = x % 3;
    best = std::min(best, simulate(spec, cluster, ScheduleMatrix(a, 3), c).avg_tuple_processing_time);
  }
  EXPECT_NEAR(colocated, best, 1e-12);
}

TEST(Simulate, ContentionPenalizesPackingUnderHighLoad) {
  const auto spec = testing::chain({0.001, 0.001, 0.001, 0.001}, 200.0);
  const auto cluster = testing::cluster(4, 0.0, 0.0002, 1.0);
  SimConfig c;
  c.warmup_duration = 5.0;
  c.measure_duration = 20.0;
  c.sample_interval = 4.0;
  const double packed =
      simulate(spec, cluster, ScheduleMatrix({0, 0, 0, 0}, 4), c).avg_tuple_processing_time;
  const double spread =
      simulate(spec, cluster, ScheduleMatrix({0, 1, 2, 3}, 4), c).avg_tuple_processing_time;
  EXPECT_GT(packed, spread);
}

TEST(Simulate, ProcessorSharingSplitsCapacity) {
  // "all" grouping replicates to three executors; completion is the slowest replica.
  TopologySpec spec = testing::chain({0.0, 0.001}, 1.0, {1, 3});
  spec.edges[0].grouping = Grouping::kAll;
  const auto c = deterministic_config();
  const ScheduleMatrix packed({0, 0, 0, 0}, 1);
  EXPECT_NEAR(simulate(spec, testing::cluster(1, 0.0, 0.0, 3.0), packed, c)
                  .avg_tuple_processing_time, 0.001, 1e-12);
  EXPECT_NEAR(simulate(spec, testing::cluster(1, 0.0, 0.0, 1.0), packed, c)
                  .avg_tuple_processing_time, 0.003, 1e-12);
}

TEST(Simulate, GlobalGroupingAlwaysUsesExecutorZero) {
  TopologySpec spec = testing::chain({0.0, 0.001}, 1.0, {1, 3});
  spec.edges[0].grouping = Grouping::kGlobal;
  // Executor 0 of the processing unit sits across the network.
  const auto r = simulate(spec, testing::cluster(2, 0.0, 0.002), ScheduleMatrix({0, 1, 0, 0}, 2),
                          deterministic_config());
  EXPECT_NEAR(r.avg_tuple_processing_time, 0.003, 1e-12);
}

TEST(Simulate, OverloadRaisesUnstableSystem) {
  const auto spec = testing::chain({0.0, 0.01}, 200.0);
  SimConfig c;
  c.warmup_duration = 1.0;
  c.measure_duration = 50.0;
  c.sample_interval = 10.0;
  c.queue_cap = 1000;
  try {
    simulate(spec, testing::cluster(1), ScheduleMatrix({0, 0}, 1), c);
    FAIL() << "expected unstable-system";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnstableSystem);
  }
}

TEST(Simulate, DimensionMismatch) {
  const auto spec = testing::chain({0.0, 0.001}, 1.0);
  try {
    simulate(spec, testing::cluster(2), ScheduleMatrix({0, 0, 0}, 2), deterministic_config());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST(Simulate, RejectsBadConfig) {
  SimConfig c;
  c.measure_duration = 0.0;
  EXPECT_THROW(validate_sim_config(c), Error);
  c = SimConfig{};
  c.measurement_samples = 0;
  EXPECT_THROW(validate_sim_config(c), Error);
}

TEST(MeasureAfterStabilization, DeterministicChainMatchesSimulate) {
  const auto spec = testing::chain({0.0, 0.001, 0.002}, 10.0);
  for (double warmup : {0.0, 1.0, 7.5}) {
    auto c = deterministic_config();
    c.warmup_duration = warmup;
    const auto r = measure_after_stabilization(spec, testing::cluster(1),
                                               ScheduleMatrix({0, 0, 0}, 1), c);
    EXPECT_NEAR(r.avg_tuple_processing_time, 0.003, 1e-12);
    EXPECT_EQ(r.per_sample_averages.size(), 5u);
  }
}

TEST(MeasureAfterStabilization, DefaultsAreFiveSamplesTenSecondsApart) {
  SimConfig c;
  EXPECT_EQ(c.measurement_samples, 5);
  EXPECT_EQ(c.sample_interval, 10.0);
}

TEST(MeasureAfterStabilization, OverloadRaisesUnstableSystem) {
  const auto spec = testing::chain({0.0, 0.01}, 300.0);
  SimConfig c;
  c.warmup_duration = 2.0;
  c.sample_interval = 2.0;
  c.queue_cap = 500;
  EXPECT_THROW(measure_after_stabilization(spec, testing::cluster(1), ScheduleMatrix({0, 0}, 1), c),
               Error);
}

}  // namespace
}  // namespace streamsched
