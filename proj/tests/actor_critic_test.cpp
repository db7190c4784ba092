#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "streamsched/actor_critic.hpp"
#include "streamsched/environment.hpp"
#include "streamsched/error.hpp"
#include "test_support.hpp"

namespace streamsched {
namespace {

AgentConfig small_config() {
  AgentConfig c;
  c.batch_size = 4;
  c.buffer_capacity = 50;
  c.k = 4;
  c.hidden_layers = {8, 4};
  c.seed = 17;
  return c;
}

SystemState random_state(const StateEncoder& enc, Rng& rng) {
  SystemState s;
  std::vector<int> m(static_cast<std::size_t>(enc.threads()));
  for (auto& v : m) v = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(enc.machines())));
  s.schedule = ScheduleMatrix(m, enc.machines());
  for (int k = 0; k < enc.sources(); ++k) s.workload.push_back(1000.0 * uniform01(rng));
  return s;
}

std::vector<TransitionSample> random_transitions(const StateEncoder& enc, int n, Rng& rng) {
  std::vector<TransitionSample> out;
  for (int i = 0; i < n; ++i) {
    TransitionSample t;
    t.state = random_state(enc, rng);
    t.action = random_state(enc, rng).schedule;
    t.next_state = {t.action, t.state.workload};
    t.reward = -0.001 - 0.002 * uniform01(rng);
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<const TransitionSample*> pointers(const std::vector<TransitionSample>& v) {
  std::vector<const TransitionSample*> p;
  for (const auto& t : v) p.push_back(&t);
  return p;
}

/// Single identity layer over the critic input with the given weights.
DenseNet linear_critic(const Eigen::RowVectorXd& w, double bias = 0.0) {
  return DenseNet({Layer{w, Eigen::VectorXd::Constant(1, bias), Activation::kIdentity}});
}

TEST(Bellman, TargetArithmetic) { EXPECT_NEAR(td_target(-2.0, 0.99, -1.5), -3.485, 1e-12); }

TEST(Bellman, LossArithmetic) {
  const std::vector<double> y{1.0, 0.0}, q{0.5, 0.5};
  EXPECT_DOUBLE_EQ(mean_squared_error(y, q), 0.25);
  EXPECT_THROW(mean_squared_error(y, std::vector<double>{1.0}), Error);
}

TEST(Bellman, ZeroGammaRegressesOnImmediateReward) {
  auto config = small_config();
  config.gamma = 0.0;
  const StateEncoder enc(3, 2, 1, 1000.0);
  ActorCriticAgent agent(config, enc);
  Rng rng(1);
  const auto batch = random_transitions(enc, 6, rng);
  const auto y = agent.compute_targets(pointers(batch));
  for (std::size_t i = 0; i < batch.size(); ++i) EXPECT_EQ(y[i], batch[i].reward);
}

TEST(Bellman, TargetUsesTargetNetworksMax) {
  const StateEncoder enc(2, 2, 1, 1000.0);
  auto config = small_config();
  config.k = 4;
  ActorCriticAgent agent(config, enc);
  Rng rng(2);
  const auto batch = random_transitions(enc, 3, rng);
  const auto y = agent.compute_targets(pointers(batch));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    // K covers the whole space, so the max runs over every action.
    double best = -1e300;
    for (const auto& a : brute_force_knn(ProtoAction::Zero(2, 2), 4).actions) {
      best = std::max(best, forward(agent.nets().critic_target,
                                    enc.critic_input(batch[i].next_state, a))(0));
    }
    EXPECT_NEAR(y[i], batch[i].reward + config.gamma * best, 1e-12);
  }
}

TEST(Selection, SingleCandidateIgnoresCritic) {
  auto config = small_config();
  config.k = 1;
  const StateEncoder enc(4, 3, 1, 1000.0);
  const ActorCriticAgent agent(config, enc);
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    const auto s = random_state(enc, rng);
    const ProtoAction proto = agent.propose(s);
    EXPECT_EQ(agent.select_from_proto(s, proto).action, nearest_action(proto));
  }
}

TEST(Selection, ConstantCriticPicksNearest) {
  const StateEncoder enc(4, 3, 1, 1000.0);
  ActorCriticAgent agent(small_config(), enc);
  agent.nets().critic = linear_critic(Eigen::RowVectorXd::Zero(enc.critic_input_dim()), 0.7);
  Rng rng(4);
  const auto s = random_state(enc, rng);
  const auto sel = agent.select_from_proto(s, agent.propose(s));
  EXPECT_EQ(sel.chosen, 0u);
  EXPECT_EQ(sel.action, sel.candidates.actions.front());
}

TEST(Selection, ScriptedCriticPicksSecondCandidate) {
  auto config = small_config();
  config.k = 3;
  const StateEncoder enc(4, 3, 1, 1000.0);
  ActorCriticAgent agent(config, enc);
  Rng rng(5);
  const auto s = random_state(enc, rng);
  const ProtoAction proto = agent.propose(s);
  const auto candidates = k_nearest_actions(proto, 3);
  // Score = number of rows shared with the second candidate.
  Eigen::RowVectorXd w = Eigen::RowVectorXd::Zero(enc.critic_input_dim());
  w.tail(enc.action_dim()) = enc.encode_action(candidates.actions[1]).transpose();
  agent.nets().critic = linear_critic(w);
  const auto sel = agent.select_from_proto(s, proto);
  EXPECT_EQ(sel.chosen, 1u);
  EXPECT_EQ(sel.action, candidates.actions[1]);
}

TEST(Selection, ChosenScoreDominatesCandidates) {
  const StateEncoder enc(5, 3, 2, 1000.0);
  ActorCriticAgent agent(small_config(), enc);
  Rng rng(6);
  for (int i = 0; i < 50; ++i) {
    const auto sel = agent.select(random_state(enc, rng), 0.5);
    ASSERT_EQ(sel.scores.size(), static_cast<Eigen::Index>(sel.candidates.actions.size()));
    for (Eigen::Index k = 0; k < sel.scores.size(); ++k) {
      EXPECT_GE(sel.scores(static_cast<Eigen::Index>(sel.chosen)), sel.scores(k));
    }
    EXPECT_EQ(sel.action, sel.candidates.actions[sel.chosen]);
  }
}

TEST(Selection, ScoresMatchDenseCritic) {
  const StateEncoder enc(5, 3, 2, 1000.0);
  ActorCriticAgent agent(small_config(), enc);
  Rng rng(7);
  const auto s = random_state(enc, rng);
  const auto sel = agent.select(s, 0.0);
  for (std::size_t k = 0; k < sel.candidates.actions.size(); ++k) {
    EXPECT_NEAR(sel.scores(static_cast<Eigen::Index>(k)),
                forward(agent.nets().critic, enc.critic_input(s, sel.candidates.actions[k]))(0),
                1e-12);
  }
}

TEST(ActorGradient, MatchesFiniteDifferences) {
  Rng rng(8);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const StateEncoder enc(2 + trial % 3, 2 + trial % 2, 1, 1000.0);
    auto config = small_config();
    config.seed = 100 + static_cast<std::uint64_t>(trial);
    ActorCriticAgent agent(config, enc);
    const auto batch = random_transitions(enc, 3, rng);
    const auto ptrs = pointers(batch);
    const Gradients g = agent.actor_objective_gradient(ptrs);
    const double h = 1e-6;
    auto& layers = agent.nets().actor.layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
      for (Eigen::Index i = 0; i < layers[l].weights.rows(); ++i) {
        for (Eigen::Index j = 0; j < layers[l].weights.cols(); ++j) {
          double& w = layers[l].weights(i, j);
          const double keep = w;
          w = keep + h;
          const double plus = agent.actor_objective(ptrs);
          w = keep - h;
          const double minus = agent.actor_objective(ptrs);
          w = keep;
          const double numeric = -(plus - minus) / (2 * h);
          const double analytic = g.weights[l](i, j);
          worst = std::max(worst, std::abs(analytic - numeric) /
                                      std::max({std::abs(analytic), std::abs(numeric), 1e-7}));
        }
      }
    }
  }
  EXPECT_LE(worst, 1e-4);
}

TEST(ActorGradient, ScalarToyMatchesChainRule) {
  // N = M = 1, no sources: state = [1] (the one-hot row), action = [a].
  const StateEncoder enc(1, 1, 0, 1000.0);
  auto config = small_config();
  config.actor_learning_rate = 0.1;
  ActorCriticAgent agent(config, enc);
  const double wa = 0.3, ba = -0.2, cs = 0.4, ca = 1.7;
  agent.nets().actor = DenseNet({Layer{Eigen::MatrixXd::Constant(1, 1, wa),
                                       Eigen::VectorXd::Constant(1, ba), Activation::kIdentity}});
  Eigen::RowVectorXd cw(2);
  cw << cs, ca;
  agent.nets().critic = linear_critic(cw);
  TransitionSample t;
  t.state = {ScheduleMatrix({0}, 1), {}};
  t.action = t.state.schedule;
  t.next_state = t.state;
  const std::vector<const TransitionSample*> batch{&t};
  // J = cs * s + ca * (wa * s + ba + 1) / 2 with s = 1.
  EXPECT_NEAR(agent.actor_objective(batch), cs + ca * (wa + ba + 1.0) / 2.0, 1e-15);
  agent.actor_train_step(batch);
  EXPECT_NEAR(agent.nets().actor.layers()[0].weights(0, 0), wa + 0.1 * ca * 0.5, 1e-15);
  EXPECT_NEAR(agent.nets().actor.layers()[0].bias(0), ba + 0.1 * ca * 0.5, 1e-15);
}

TEST(ActorGradient, ZeroActionGradientLeavesActorUnchanged) {
  const StateEncoder enc(3, 2, 1, 1000.0);
  ActorCriticAgent agent(small_config(), enc);
  Eigen::RowVectorXd w = Eigen::RowVectorXd::Zero(enc.critic_input_dim());
  w.head(enc.state_dim()).setConstant(0.5);
  agent.nets().critic = linear_critic(w, 1.0);
  Rng rng(9);
  const auto batch = random_transitions(enc, 4, rng);
  const auto before = agent.nets().actor;
  agent.actor_train_step(pointers(batch));
  for (std::size_t l = 0; l < before.layers().size(); ++l) {
    EXPECT_EQ(agent.nets().actor.layers()[l].weights, before.layers()[l].weights);
    EXPECT_EQ(agent.nets().actor.layers()[l].bias, before.layers()[l].bias);
  }
}

TEST(CriticStep, ReducesLossOnFixedBatch) {
  auto config = small_config();
  config.gamma = 0.0;
  config.critic_learning_rate = 0.05;
  const StateEncoder enc(3, 2, 1, 1000.0);
  ActorCriticAgent agent(config, enc);
  Rng rng(10);
  const auto batch = random_transitions(enc, 8, rng);
  const double first = agent.critic_train_step(pointers(batch));
  double last = first;
  for (int i = 0; i < 200; ++i) last = agent.critic_train_step(pointers(batch));
  EXPECT_LT(last, 0.1 * first);
}

class AgentEnvironment : public ::testing::Test {
 protected:
  AgentEnvironment()
      : env_(testing::chain({0.0, 0.001, 0.001}, 100.0, {1, 2, 2}), testing::cluster(2, 1e-5, 1e-4),
             quick_sim()) {}

  static SimConfig quick_sim() {
    SimConfig c;
    c.warmup_duration = 0.5;
    c.measurement_samples = 2;
    c.sample_interval = 0.5;
    return c;
  }

  StateEncoder encoder() const { return StateEncoder(env_.threads(), env_.machines(), env_.sources(), 1000.0); }

  SchedulingEnvironment env_;
};

TEST_F(AgentEnvironment, PretrainZeroSamplesIsNoop) {
  ActorCriticAgent agent(small_config(), encoder());
  const auto before = agent.nets().critic;
  agent.pretrain_offline(env_, 0);
  EXPECT_TRUE(agent.buffer().empty());
  EXPECT_EQ(agent.nets().critic.layers()[0].weights, before.layers()[0].weights);
}

TEST_F(AgentEnvironment, PretrainFillsBufferWithFeasibleActions) {
  ActorCriticAgent agent(small_config(), encoder());
  const auto before = agent.nets().critic;
  agent.pretrain_offline(env_, 10);
  ASSERT_EQ(agent.buffer().size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) {
    const auto row = agent.buffer()[i].action.flatten();
    EXPECT_EQ(std::accumulate(row.begin(), row.end(), 0.0), 5.0);
    EXPECT_LT(agent.buffer()[i].reward, 0.0);
  }
  EXPECT_NE(agent.nets().critic.layers()[0].weights, before.layers()[0].weights);
}

TEST_F(AgentEnvironment, OnlineLogAndWorkloadStep) {
  ActorCriticAgent agent(small_config(), encoder());
  EXPECT_TRUE(agent.run_online(env_, 0, {}).empty());
  const auto log = agent.run_online(env_, 8, {{4, 1.5}});
  ASSERT_EQ(log.size(), 8u);
  for (int t = 0; t < 8; ++t) {
    EXPECT_EQ(log[static_cast<std::size_t>(t)].epoch, t);
    EXPECT_DOUBLE_EQ(log[static_cast<std::size_t>(t)].reward,
                     -log[static_cast<std::size_t>(t)].avg_time_seconds);
  }
  EXPECT_GE(log.front().epsilon, log.back().epsilon);
  EXPECT_DOUBLE_EQ(env_.workload_scale(), 1.5);
  EXPECT_DOUBLE_EQ(env_.workload()[0], 150.0);
}

TEST_F(AgentEnvironment, CheckpointRestoresBehaviour) {
  ActorCriticAgent agent(small_config(), encoder());
  agent.pretrain_offline(env_, 8);
  const auto saved = nlohmann::json::parse(agent.checkpoint().dump());
  auto config = small_config();
  config.seed = 999;
  ActorCriticAgent other(config, encoder());
  other.restore(saved);
  const auto s = env_.state();
  EXPECT_EQ(other.propose(s), agent.propose(s));
  EXPECT_EQ(other.select_from_proto(s, agent.propose(s)).action,
            agent.select_from_proto(s, agent.propose(s)).action);
  EXPECT_EQ(other.shaper().count(), agent.shaper().count());

  auto broken = saved;
  broken.erase("critic");
  EXPECT_THROW(other.restore(broken), Error);
}

}  // namespace
}  // namespace streamsched
