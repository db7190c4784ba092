#include <gtest/gtest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "streamsched/dqn.hpp"
#include "streamsched/environment.hpp"
#include "streamsched/error.hpp"
#include "test_support.hpp"

namespace streamsched {
namespace {

AgentConfig small_config() {
  AgentConfig c;
  c.batch_size = 4;
  c.buffer_capacity = 50;
  c.hidden_layers = {8};
  c.seed = 23;
  return c;
}

SystemState state_of(std::vector<int> machines, int m, int sources) {
  return {ScheduleMatrix(std::move(machines), m), std::vector<double>(static_cast<std::size_t>(sources), 500.0)};
}

TEST(DqnCandidates, NTimesMSingleMoves) {
  const DqnAgent agent(small_config(), StateEncoder(10, 4, 1, 1000.0));
  const ScheduleMatrix current({0, 1, 2, 3, 0, 1, 2, 3, 0, 1}, 4);
  const auto c = agent.candidates(current);
  ASSERT_EQ(c.size(), 40u);
  EXPECT_EQ(agent.action_count(), 40);
  for (std::size_t idx = 0; idx < c.size(); ++idx) {
    const auto moved = schedule_diff(current, c[idx]);
    EXPECT_LE(moved.size(), 1u);
    EXPECT_EQ(c[idx].machine_of(static_cast<int>(idx / 4)), static_cast<int>(idx % 4));
  }
}

TEST(DqnSelect, GreedyTakesArgmax) {
  DqnAgent agent(small_config(), StateEncoder(1, 2, 0, 1000.0));
  // Q values 0.2 and 0.7 for moving the single thread to machine 0 or 1.
  Eigen::VectorXd b(2);
  b << 0.2, 0.7;
  agent.q_net() = DenseNet({Layer{Eigen::MatrixXd::Zero(2, 2), b, Activation::kIdentity}});
  const auto sel = agent.select(state_of({0}, 2, 0), 0.0);
  EXPECT_FALSE(sel.explored);
  EXPECT_EQ(sel.index, 1);
  EXPECT_EQ(sel.action.machine_of(0), 1);
  EXPECT_EQ(sel.q_values.size(), 2);
}

TEST(DqnSelect, GreedyTiesGoToLowestIndex) {
  DqnAgent agent(small_config(), StateEncoder(2, 2, 0, 1000.0));
  agent.q_net() = DenseNet({Layer{Eigen::MatrixXd::Zero(4, 4), Eigen::VectorXd::Ones(4),
                                  Activation::kIdentity}});
  EXPECT_EQ(agent.select(state_of({1, 1}, 2, 0), 0.0).index, 0);
}

TEST(DqnSelect, FullEpsilonIsUniform) {
  DqnAgent agent(small_config(), StateEncoder(2, 3, 1, 1000.0));
  std::vector<int> hits(6, 0);
  const int draws = 12000;
  for (int d = 0; d < draws; ++d) {
    const auto sel = agent.select(state_of({0, 2}, 3, 1), 1.0);
    EXPECT_TRUE(sel.explored);
    ++hits[static_cast<std::size_t>(sel.index)];
  }
  const double p = 1.0 / 6.0, sd = std::sqrt(draws * p * (1 - p));
  for (int h : hits) EXPECT_NEAR(h, draws * p, 5 * sd);
}

TEST(DqnTargets, ZeroGammaAndArithmetic) {
  auto config = small_config();
  config.gamma = 0.0;
  DqnAgent myopic(config, StateEncoder(2, 2, 0, 1000.0));
  TransitionSample t{state_of({0, 1}, 2, 0), ScheduleMatrix({1, 1}, 2), -0.003,
                     state_of({1, 1}, 2, 0), 0};
  const std::vector<const TransitionSample*> batch{&t};
  EXPECT_EQ(myopic.compute_targets(batch)[0], -0.003);

  DqnAgent agent(small_config(), StateEncoder(2, 2, 0, 1000.0));
  const double max_q = forward(agent.q_target(), agent.encoder().encode_state(t.next_state)).maxCoeff();
  EXPECT_NEAR(agent.compute_targets(batch)[0], -0.003 + 0.99 * max_q, 1e-15);
}

TEST(DqnTraining, FitsFixedBatch) {
  auto config = small_config();
  config.gamma = 0.0;
  config.critic_learning_rate = 0.05;
  DqnAgent agent(config, StateEncoder(2, 2, 0, 1000.0));
  std::vector<TransitionSample> samples;
  for (int idx = 0; idx < 4; ++idx) {
    const auto s = state_of({0, 1}, 2, 0);
    samples.push_back({s, agent.apply(s.schedule, idx), -0.1 * (idx + 1), s, idx});
  }
  std::vector<const TransitionSample*> batch;
  for (const auto& s : samples) batch.push_back(&s);
  const double first = agent.train_batch(batch);
  double last = first;
  for (int i = 0; i < 500; ++i) last = agent.train_batch(batch);
  EXPECT_LT(last, 0.01 * first);
}

TEST(DqnEnvironment, PretrainOnlineAndCheckpoint) {
  SimConfig sim;
  sim.warmup_duration = 0.5;
  sim.measurement_samples = 2;
  sim.sample_interval = 0.5;
  SchedulingEnvironment env(testing::chain({0.0, 0.001, 0.001}, 100.0, {1, 2, 2}),
                            testing::cluster(2, 1e-5, 1e-4), sim);
  const StateEncoder enc(env.threads(), env.machines(), env.sources(), 1000.0);
  DqnAgent agent(small_config(), enc);
  const auto initial = env.schedule();
  agent.pretrain_offline(env, 6);
  EXPECT_EQ(agent.buffer().size(), 6u);
  EXPECT_EQ(env.schedule(), initial);
  for (std::size_t i = 0; i < 6; ++i) {
    const auto& t = agent.buffer()[i];
    EXPECT_EQ(agent.apply(t.state.schedule, t.action_index), t.action);
  }
  const auto log = agent.run_online(env, 5, {});
  ASSERT_EQ(log.size(), 5u);
  for (const auto& r : log) EXPECT_LE(r.moved_threads, 1);

  DqnAgent other(small_config(), enc);
  other.restore(nlohmann::json::parse(agent.checkpoint().dump()));
  EXPECT_EQ(other.q_values(env.state()), agent.q_values(env.state()));
}

}  // namespace
}  // namespace streamsched
