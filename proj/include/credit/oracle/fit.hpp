#pragma once

#include <vector>

#include <Eigen/Core>

#include "credit/env/matrix_game.hpp"

namespace credit::oracle {

struct FitResult {
  Eigen::MatrixXd per_state_weights;   // n_states x n_agents
  Eigen::VectorXd per_state_bias;      // n_states
  Eigen::VectorXd per_state_residual;  // RMS residual of each state's own fit
  double residual_rms = 0.0;           // over all fitted (state, joint action) pairs
  Eigen::VectorXd constant_weights;    // n_agents, shared by every state
  double constant_bias = 0.0;
  double constant_weight_residual_rms = 0.0;
  // States whose per-agent utilities are all constant; only a bias was fitted.
  std::vector<bool> degenerate;
  // Terminal states carry no action values and are left out of both fits.
  std::vector<bool> fitted;
  Eigen::MatrixXd q_star;  // n_states x joint_count

  bool any_degenerate() const;
};

inline constexpr int kMaxFitJointActions = 10'000;

// Q_i(s, a_i) = max over the other agents' actions of Q*(s, .).
// Returns one n_actions x n_agents matrix per state.
std::vector<Eigen::MatrixXd> greedy_utilities(const env::MatrixGame& game, const Eigen::MatrixXd& q_star);

// Least-squares fit of Q*(s, a) by w(s) . (Q_1(s, a_1), ..., Q_n(s, a_n)) + b(s)
// per state, plus the same fit with one (w, b) shared across states.
// Rank-deficient designs use the minimum-norm solution.
FitResult representability_fit(const env::MatrixGame& game, double gamma);

}  // namespace credit::oracle
