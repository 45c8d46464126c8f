#include <filesystem>
#include <fstream>

#include <Eigen/SVD>
#include <gtest/gtest.h>
#include <json.hpp>

#include "credit/env/matrix_game.hpp"
#include "credit/oracle/fit.hpp"

using namespace credit;

namespace {

env::MatrixGame load_game(const std::string& name) {
  std::ifstream in(std::filesystem::path(CREDIT_SOURCE_DIR) / "fixtures/games" / name);
  return env::MatrixGame::from_json(nlohmann::json::parse(in));
}

// Plain value iteration over the payoff table, two agents.
Eigen::MatrixXd reference_q(const env::MatrixGame& g, double gamma) {
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(g.n_states, g.joint_count());
  for (int it = 0; it < 5000; ++it) {
    Eigen::MatrixXd next = g.payoff;
    for (int s = 0; s < g.n_states; ++s)
      for (int j = 0; j < g.joint_count(); ++j) {
        const int sp = g.transition[s][j];
        const bool stop = !g.terminal.empty() && g.terminal[sp];
        if (!stop) next(s, j) += gamma * q.row(sp).maxCoeff();
      }
    q = next;
  }
  return q;
}

struct Design {
  Eigen::MatrixXd x;  // rows: (state, joint); cols: Q_1, Q_2, 1
  Eigen::VectorXd y;
};

Design state_design(const env::MatrixGame& g, const Eigen::MatrixXd& q, int s) {
  const int m = g.n_actions;
  Design d{Eigen::MatrixXd(m * m, 3), Eigen::VectorXd(m * m)};
  for (int a0 = 0; a0 < m; ++a0)
    for (int a1 = 0; a1 < m; ++a1) {
      double q0 = -1e300, q1 = -1e300;
      for (int b = 0; b < m; ++b) {
        q0 = std::max(q0, q(s, a0 * m + b));
        q1 = std::max(q1, q(s, b * m + a1));
      }
      d.x.row(a0 * m + a1) << q0, q1, 1.0;
      d.y(a0 * m + a1) = q(s, a0 * m + a1);
    }
  return d;
}

double lsq_rms(const Design& d) {
  const Eigen::VectorXd w = d.x.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(d.y);
  return std::sqrt((d.x * w - d.y).squaredNorm() / static_cast<double>(d.y.size()));
}

Design stack(const Design& a, const Design& b) {
  Design d{Eigen::MatrixXd(a.x.rows() + b.x.rows(), 3), Eigen::VectorXd(a.y.size() + b.y.size())};
  d.x << a.x, b.x;
  d.y << a.y, b.y;
  return d;
}

}  // namespace

TEST(Fit, TwoStateGameNeedsStateDependentWeights) {
  const auto game = load_game("two_state.json");
  const double gamma = 0.5;
  const auto fit = oracle::representability_fit(game, gamma);
  const Eigen::MatrixXd q = reference_q(game, gamma);
  EXPECT_LT((fit.q_star - q).cwiseAbs().maxCoeff(), 1e-10);

  const auto d0 = state_design(game, q, 0);
  const auto d1 = state_design(game, q, 1);
  EXPECT_LT(lsq_rms(d0), 1e-10);
  EXPECT_LT(lsq_rms(d1), 1e-10);
  const double shared = lsq_rms(stack(d0, d1));

  EXPECT_LT(fit.residual_rms, 1e-8);
  EXPECT_GT(fit.constant_weight_residual_rms, 0.1);
  EXPECT_NEAR(fit.constant_weight_residual_rms, shared, 1e-9);
  ASSERT_EQ(fit.per_state_weights.rows(), 2);
  // State 0 pays for agent 0's action only, state 1 for agent 1's.
  EXPECT_GT(fit.per_state_weights(0, 0), 0.5);
  EXPECT_GT(fit.per_state_weights(1, 1), 0.5);
}

TEST(Fit, AdditiveGameFitsEitherWay) {
  const auto game = load_game("additive.json");
  const auto fit = oracle::representability_fit(game, 0.5);
  EXPECT_LT(fit.residual_rms, 1e-9);
  EXPECT_LT(fit.constant_weight_residual_rms, 1e-9);
  const Eigen::MatrixXd q = reference_q(game, 0.5);
  EXPECT_LT(lsq_rms(stack(state_design(game, q, 0), state_design(game, q, 1))), 1e-9);
}

TEST(Fit, MinimumNormWeights) {
  // With a constant utility column the design is rank deficient; the fit
  // must return the minimum-norm solution, matching the SVD pseudo-inverse.
  const auto game = load_game("two_state.json");
  const auto fit = oracle::representability_fit(game, 0.5);
  const Eigen::MatrixXd q = reference_q(game, 0.5);
  for (int s = 0; s < 2; ++s) {
    const auto d = state_design(game, q, s);
    const Eigen::VectorXd w = d.x.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(d.y);
    EXPECT_LT((fit.per_state_weights.row(s).transpose() - w.head(2)).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_NEAR(fit.per_state_bias(s), w(2), 1e-8);
  }
}

TEST(Fit, TerminalStatesAreSkipped) {
  const auto game = load_game("climb.json");
  const auto fit = oracle::representability_fit(game, 0.9);
  ASSERT_EQ(fit.fitted.size(), static_cast<std::size_t>(game.n_states));
  for (int s = 0; s < game.n_states; ++s) EXPECT_EQ(fit.fitted[s], !game.terminal[s]);
}

TEST(Fit, ConstantUtilitiesAreDegenerate) {
  env::MatrixGame g;
  g.n_states = 1;
  g.n_agents = 2;
  g.n_actions = 2;
  g.payoff = Eigen::MatrixXd::Constant(1, 4, 2.0);
  g.transition = {{0, 0, 0, 0}};
  g.terminal = {false};
  const auto fit = oracle::representability_fit(g, 0.5);
  EXPECT_TRUE(fit.any_degenerate());
  EXPECT_LT(fit.residual_rms, 1e-12);
}

TEST(Fit, GreedyUtilitiesAreMaxMarginals) {
  const auto game = load_game("additive.json");
  const Eigen::MatrixXd q = reference_q(game, 0.5);
  const auto u = oracle::greedy_utilities(game, q);
  ASSERT_EQ(u.size(), 2u);
  const auto d = state_design(game, q, 0);
  EXPECT_NEAR(u[0](1, 0), d.x(2, 0), 1e-12);  // a0 = 1
  EXPECT_NEAR(u[0](1, 1), d.x(1, 1), 1e-12);  // a1 = 1
}
