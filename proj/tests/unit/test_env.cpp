#include <array>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "credit/env/lbf.hpp"
#include "credit/env/matrix_game.hpp"
#include "credit/env/multi_agent_env.hpp"

using namespace credit::env;

namespace {

constexpr int kNoop = 0, kNorth = 1, kSouth = 2, kWest = 3, kEast = 4, kPickup = 5;

LbfConfig small_coop() { return {8, 2, 2, true, 2, 50, 2}; }

std::vector<int> acts(std::initializer_list<int> a) { return a; }

}  // namespace

TEST(LbfReset, StateLengthMatchesLayout) {
  LbfEnv env(small_coop());
  const auto step = env.reset(7);
  EXPECT_EQ(step.state.size(), 14);
  EXPECT_EQ(step.obs.size(), 2u);
  EXPECT_EQ(step.obs[0].size(), 12);

  LbfEnv bigger({10, 3, 3, false, 2, 50, 2});
  EXPECT_EQ(bigger.reset(0).state.size(), 21);
}

TEST(LbfReset, SameSeedSameState) {
  LbfEnv a(small_coop()), b(small_coop());
  EXPECT_EQ(a.reset(7).state, b.reset(7).state);
  EXPECT_NE(a.reset(7).state, a.reset(8).state);
}

TEST(LbfReset, LastActionsStartAtMinusOneAndLevelsInRange) {
  LbfEnv env(small_coop());
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = env.reset(seed).state;
    EXPECT_EQ(s(12), -1.0);
    EXPECT_EQ(s(13), -1.0);
    EXPECT_GE(s(2), 1.0);
    EXPECT_LE(s(2), 2.0);
    // Cooperative foods need every agent.
    EXPECT_EQ(s(8), s(2) + s(5));
    EXPECT_EQ(s(11), s(2) + s(5));
  }
}

TEST(LbfReset, EntitiesOnDistinctCells) {
  LbfEnv env({6, 3, 2, false, 1, 50, 3});
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    env.reset(seed);
    std::set<std::pair<int, int>> cells;
    for (const auto& a : env.agents()) cells.insert({a.pos.x, a.pos.y});
    for (const auto& f : env.foods()) cells.insert({f.pos.x, f.pos.y});
    EXPECT_EQ(cells.size(), 5u);
  }
}

TEST(LbfConfig, RejectsInvalid) {
  EXPECT_THROW((LbfConfig{3, 1, 1, false, 1, 10, 1}.validate()), std::invalid_argument);
  EXPECT_THROW((LbfConfig{8, 0, 1, false, 1, 10, 1}.validate()), std::invalid_argument);
  EXPECT_THROW((LbfConfig{8, 1, 0, false, 1, 10, 1}.validate()), std::invalid_argument);
  EXPECT_THROW((LbfConfig{8, 1, 1, false, -1, 10, 1}.validate()), std::invalid_argument);
  EXPECT_THROW((LbfConfig{8, 1, 1, false, 1, 0, 1}.validate()), std::invalid_argument);
}

class LbfScenario : public ::testing::Test {
 protected:
  LbfEnv env{small_coop()};
  void SetUp() override {
    env.reset(0);
    // Food at (3,3) level 2; second food far away at (6,6) level 2.
    env.set_layout({{{3, 2}, 1, -1}, {{2, 3}, 1, -1}}, {{{3, 3}, 2, false}, {{6, 6}, 2, false}});
  }
};

TEST_F(LbfScenario, CoopPickupByBothCollects) {
  const auto s = env.step(acts({kPickup, kPickup}));
  EXPECT_DOUBLE_EQ(s.reward, 2.0);
  EXPECT_EQ(s.state(6), -1.0);
  EXPECT_EQ(s.state(7), -1.0);
  EXPECT_EQ(s.state(8), 0.0);
  EXPECT_FALSE(s.done);
  EXPECT_EQ(s.state(12), kPickup);
}

TEST_F(LbfScenario, CoopPickupAloneFails) {
  env.set_layout({{{3, 2}, 1, -1}, {{0, 7}, 1, -1}}, {{{3, 3}, 2, false}, {{6, 6}, 2, false}});
  const auto s = env.step(acts({kPickup, kPickup}));
  EXPECT_DOUBLE_EQ(s.reward, 0.0);
  EXPECT_EQ(s.state(8), 2.0);
}

TEST_F(LbfScenario, PickupNeedsEveryoneToChooseIt) {
  const auto s = env.step(acts({kPickup, kNoop}));
  EXPECT_DOUBLE_EQ(s.reward, 0.0);
}

TEST_F(LbfScenario, MovesIntoFoodOrWallAreNoops) {
  // Agent 0 at (3,2) moving south would enter the food at (3,3).
  env.set_layout({{{3, 2}, 1, -1}, {{0, 0}, 1, -1}}, {{{3, 3}, 2, false}, {{6, 6}, 2, false}});
  auto s = env.step(acts({kSouth, kNorth}));
  EXPECT_EQ(s.state(0), 3.0);
  EXPECT_EQ(s.state(1), 2.0);
  EXPECT_EQ(s.state(3), 0.0);
  EXPECT_EQ(s.state(4), 0.0);
  s = env.step(acts({kNorth, kWest}));
  EXPECT_EQ(s.state(1), 1.0);
  EXPECT_EQ(s.state(3), 0.0);
}

TEST_F(LbfScenario, ContestedTargetBothStay) {
  env.set_layout({{{1, 1}, 1, -1}, {{3, 1}, 1, -1}}, {{{5, 5}, 2, false}, {{2, 5}, 2, false}});
  const auto s = env.step(acts({kEast, kWest}));
  EXPECT_EQ(s.state(0), 1.0);
  EXPECT_EQ(s.state(3), 3.0);
}

TEST_F(LbfScenario, MoveIntoOccupiedCellIsNoop) {
  env.set_layout({{{1, 1}, 1, -1}, {{2, 1}, 1, -1}}, {{{5, 5}, 2, false}, {{2, 5}, 2, false}});
  const auto s = env.step(acts({kEast, kNoop}));
  EXPECT_EQ(s.state(0), 1.0);
}

TEST_F(LbfScenario, DoneWhenAllCollected) {
  env.step(acts({kPickup, kPickup}));
  env.set_layout({{{6, 5}, 1, -1}, {{5, 6}, 1, -1}}, {{{3, 3}, 2, true}, {{6, 6}, 2, false}});
  const auto s = env.step(acts({kPickup, kPickup}));
  EXPECT_DOUBLE_EQ(s.reward, 2.0);
  EXPECT_TRUE(s.done);
  EXPECT_TRUE(env.all_collected());
  EXPECT_THROW(env.step(acts({kNoop, kNoop})), StepAfterDone);
}

TEST(LbfStep, HorizonEndsEpisode) {
  LbfEnv env({8, 2, 2, true, 2, 5, 2});
  env.reset(3);
  LbfStep s;
  for (int t = 0; t < 5; ++t) s = env.step(acts({kNoop, kNoop}));
  EXPECT_TRUE(s.done);
  EXPECT_FALSE(env.all_collected());
}

TEST(LbfStep, InvalidActionsRejected) {
  LbfEnv env(small_coop());
  env.reset(0);
  EXPECT_THROW(env.step(acts({6, 0})), std::invalid_argument);
  EXPECT_THROW(env.step(acts({0})), std::invalid_argument);
}

TEST(LbfObservation, MasksOutsideSightWindow) {
  LbfEnv env(small_coop());
  env.reset(0);
  env.set_layout({{{0, 0}, 1, -1}, {{7, 7}, 2, -1}}, {{{2, 2}, 3, false}, {{5, 5}, 3, false}});
  const auto o0 = env.observation(0);
  // Own triple first and never masked.
  EXPECT_EQ(o0(0), 0.0);
  EXPECT_EQ(o0(2), 1.0);
  // Other agent at Chebyshev distance 7 > 2: masked.
  EXPECT_EQ(o0(3), -1.0);
  EXPECT_EQ(o0(4), -1.0);
  EXPECT_EQ(o0(5), 0.0);
  // Food at (2,2) is exactly at distance 2: visible. Food at (5,5) masked.
  EXPECT_EQ(o0(6), 2.0);
  EXPECT_EQ(o0(8), 3.0);
  EXPECT_EQ(o0(9), -1.0);
  EXPECT_EQ(o0(11), 0.0);
  const auto o1 = env.observation(1);
  EXPECT_EQ(o1(0), 7.0);
  EXPECT_EQ(o1(3), -1.0);
  EXPECT_EQ(o1(9), 5.0);
}

TEST(LbfProperties, RandomRolloutsKeepInvariants) {
  const LbfConfig cfg{7, 3, 2, false, 1, 40, 3};
  LbfEnv env(cfg);
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> any(0, 5);
  for (std::uint64_t ep = 0; ep < 40; ++ep) {
    env.reset(ep);
    double collected_levels = 0.0;
    const double total = env.total_food_level();
    bool done = false;
    while (!done) {
      std::vector<int> a{any(rng), any(rng), any(rng)};
      const auto s = env.step(a);
      collected_levels += s.reward;
      done = s.done;
      ASSERT_EQ(s.state.size(), cfg.state_dim());
      for (const auto& o : s.obs) ASSERT_EQ(o.size(), cfg.obs_dim());
      std::set<std::pair<int, int>> cells;
      for (const auto& ag : env.agents()) {
        ASSERT_GE(ag.pos.x, 0);
        ASSERT_LT(ag.pos.x, cfg.grid_size);
        ASSERT_GE(ag.pos.y, 0);
        ASSERT_LT(ag.pos.y, cfg.grid_size);
        cells.insert({ag.pos.x, ag.pos.y});
      }
      for (const auto& f : env.foods())
        if (!f.collected) cells.insert({f.pos.x, f.pos.y});
      std::size_t live = env.agents().size();
      for (const auto& f : env.foods()) live += f.collected ? 0 : 1;
      ASSERT_EQ(cells.size(), live);
      for (int i = 0; i < 3; ++i) ASSERT_EQ(s.state(cfg.obs_dim() + i), a[i]);
    }
    EXPECT_LE(collected_levels, total + 1e-12);
    if (env.all_collected()) EXPECT_DOUBLE_EQ(collected_levels, total);
  }
}

TEST(LbfTask, TerminatedOnlyWhenCleared) {
  LbfTask task({8, 2, 2, true, 2, 3, 2});
  task.reset(1);
  EnvStep s;
  for (int t = 0; t < 3; ++t) s = task.step(std::array<int, 2>{0, 0});
  EXPECT_TRUE(s.done);
  EXPECT_FALSE(s.terminated);
  EXPECT_FALSE(task.success());
}

// ---- matrix games ----

namespace {

MatrixGame two_state(double r0 = 1.0, double r1 = 3.0) {
  MatrixGame g;
  g.n_states = 2;
  g.n_agents = 2;
  g.n_actions = 2;
  g.payoff.resize(2, 4);
  g.payoff << r0, r0, 0, 0,  //
      r1, 0, r1, 0;
  g.transition = {{1, 1, 1, 1}, {0, 0, 0, 0}};
  g.terminal = {false, false};
  return g;
}

}  // namespace

TEST(MatrixGame, JointIndexIsAgentZeroMajor) {
  MatrixGame g = two_state();
  EXPECT_EQ(g.joint_count(), 4);
  EXPECT_EQ(g.joint_index(std::array<int, 2>{1, 0}), 2);
  EXPECT_EQ(g.joint_actions(3), (std::vector<int>{1, 1}));
}

TEST(MatrixGame, JsonRoundTrip) {
  const MatrixGame g = two_state();
  const auto back = MatrixGame::from_json(g.to_json());
  EXPECT_EQ(back.payoff, g.payoff);
  EXPECT_EQ(back.transition, g.transition);
}

TEST(MatrixGame, ValidateRejectsBadTransitions) {
  MatrixGame g = two_state();
  g.transition[0][0] = 5;
  EXPECT_THROW(g.validate(), std::invalid_argument);
}

TEST(MatrixGame, StepFollowsTables) {
  const MatrixGame g = two_state();
  const auto s = matrix_step(g, 0, std::array<int, 2>{0, 1});
  EXPECT_EQ(s.next_state, 1);
  EXPECT_DOUBLE_EQ(s.reward, 1.0);
  EXPECT_FALSE(s.done);
}

TEST(OracleJointQ, MatchesClosedForm) {
  // V0 = 1 + g V1, V1 = 3 + g V0 with g = 0.5 gives V0 = 10/3, V1 = 14/3.
  const auto q = oracle_joint_q(two_state(), 0.5);
  EXPECT_NEAR(q(0, 0), 1.0 + 0.5 * 14.0 / 3.0, 1e-10);
  EXPECT_NEAR(q(0, 3), 0.5 * 14.0 / 3.0, 1e-10);
  EXPECT_NEAR(q(1, 0), 3.0 + 0.5 * 10.0 / 3.0, 1e-10);
  EXPECT_NEAR(q(1, 1), 0.5 * 10.0 / 3.0, 1e-10);
}

TEST(OracleJointQ, IsBellmanFixedPoint) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    MatrixGame g;
    g.n_states = 3;
    g.n_agents = 2;
    g.n_actions = 3;
    g.payoff = Eigen::MatrixXd::NullaryExpr(3, 9, [&] { return u(rng); });
    g.transition.assign(3, std::vector<int>(9));
    for (auto& row : g.transition)
      for (auto& t : row) t = std::uniform_int_distribution<int>(0, 2)(rng);
    g.terminal = {false, false, trial % 2 == 0};
    const double gamma = 0.9;
    const auto q = oracle_joint_q(g, gamma);
    EXPECT_LT((bellman_backup(g, q, gamma) - q).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(OracleJointQ, NoBootstrapPastTerminal) {
  MatrixGame g = two_state();
  g.terminal = {false, true};
  const auto q = oracle_joint_q(g, 0.9);
  EXPECT_NEAR(q(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(q(0, 3), 0.0, 1e-12);
}

TEST(OracleJointQ, RejectsGammaOne) { EXPECT_THROW(oracle_joint_q(two_state(), 1.0), std::invalid_argument); }

TEST(MatrixTask, OneHotStateAndHorizon) {
  MatrixTask task(two_state(), 2);
  task.reset(0);
  EXPECT_EQ(task.state(), Eigen::Vector2d(1, 0));
  auto s = task.step(std::array<int, 2>{0, 0});
  EXPECT_DOUBLE_EQ(s.reward, 1.0);
  EXPECT_EQ(task.state(), Eigen::Vector2d(0, 1));
  s = task.step(std::array<int, 2>{0, 0});
  EXPECT_TRUE(s.done);
  EXPECT_FALSE(s.terminated);
}
