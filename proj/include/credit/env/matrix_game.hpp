#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

namespace credit::env {

// Finite cooperative stochastic-free game: payoff and successor per
// (state, joint action). Joint actions are indexed mixed-radix with agent 0
// most significant, so for two agents index = a0 * n_actions + a1.
struct MatrixGame {
  int n_states = 1;
  int n_agents = 1;
  int n_actions = 1;
  int initial_state = 0;
  Eigen::MatrixXd payoff;                 // n_states x joint_count
  std::vector<std::vector<int>> transition;  // [state][joint] -> next state
  std::vector<bool> terminal;

  int joint_count() const;
  int joint_index(std::span<const int> actions) const;
  std::vector<int> joint_actions(int index) const;

  // Throws std::invalid_argument on inconsistent shapes, non-finite payoff or
  // out-of-range transitions.
  void validate() const;

  static MatrixGame from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct MatrixStep {
  int next_state = 0;
  double reward = 0.0;
  bool done = false;
};

int matrix_reset(const MatrixGame& game);
MatrixStep matrix_step(const MatrixGame& game, int state, std::span<const int> joint_action);

// Exact joint action-value by value iteration; no bootstrap past a terminal
// successor. Returns n_states x joint_count.
Eigen::MatrixXd oracle_joint_q(const MatrixGame& game, double gamma);

// One Bellman backup of q (used by the fixed-point property tests).
Eigen::MatrixXd bellman_backup(const MatrixGame& game, const Eigen::MatrixXd& q, double gamma);

}  // namespace credit::env
