#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace credit::env {

// Action ids follow the usual LBF encoding. North decreases y, West decreases x.
enum class LbfAction : int { Noop = 0, North = 1, South = 2, West = 3, East = 4, Pickup = 5 };
inline constexpr int kLbfActions = 6;

struct LbfConfig {
  int grid_size = 8;
  int n_agents = 2;
  int n_foods = 2;
  bool coop = true;
  int sight_radius = 2;
  int max_steps = 50;
  int level_max = 2;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;

  int state_dim() const { return 3 * n_agents + 3 * n_foods + n_agents; }
  int obs_dim() const { return 3 * n_agents + 3 * n_foods; }
};

class StepAfterDone : public std::logic_error {
 public:
  StepAfterDone() : std::logic_error("StepAfterDone: episode already finished") {}
};

struct Cell {
  int x = 0;
  int y = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

struct Agent {
  Cell pos;
  int level = 1;
  int last_action = -1;
};

struct Food {
  Cell pos;
  int level = 1;
  bool collected = false;
};

struct LbfStep {
  Eigen::VectorXd state;
  std::vector<Eigen::VectorXd> obs;
  double reward = 0.0;
  bool done = false;
};

// Level-based foraging gridworld. Agents and foods occupy distinct cells;
// foods sit in the interior (never on the border) and are never 8-adjacent to
// each other, so every food has four free neighbor cells at reset.
class LbfEnv {
 public:
  explicit LbfEnv(LbfConfig config);

  LbfStep reset(std::uint64_t seed);
  LbfStep step(std::span<const int> joint_action);

  Eigen::VectorXd global_state() const;
  Eigen::VectorXd observation(int agent) const;
  std::vector<Eigen::VectorXd> observations() const;

  const LbfConfig& config() const { return config_; }
  const std::vector<Agent>& agents() const { return agents_; }
  const std::vector<Food>& foods() const { return foods_; }
  int steps() const { return steps_; }
  bool done() const { return done_; }
  bool all_collected() const;
  double total_food_level() const;

  // Replaces the current layout (test and scripted-scenario hook). Resets the
  // step counter and last actions.
  void set_layout(std::vector<Agent> agents, std::vector<Food> foods);

 private:
  bool in_grid(Cell c) const;
  bool food_at(Cell c) const;
  bool agent_at(Cell c) const;

  LbfConfig config_;
  std::vector<Agent> agents_;
  std::vector<Food> foods_;
  int steps_ = 0;
  bool done_ = false;
};

inline bool adjacent4(Cell a, Cell b) {
  const int dx = a.x > b.x ? a.x - b.x : b.x - a.x;
  const int dy = a.y > b.y ? a.y - b.y : b.y - a.y;
  return dx + dy == 1;
}

}  // namespace credit::env
