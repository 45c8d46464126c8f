#include "credit/trainer/policy.hpp"

#include <cstdlib>
#include <deque>
#include <stdexcept>

#include "credit/trainer/learner.hpp"

namespace credit::train {

std::vector<int> GreedyQPolicy::act(const env::MultiAgentEnv& env) {
  const Eigen::MatrixXd q = agent_q_values(agent_, encode_agent_inputs(env));
  std::vector<int> actions(q.cols());
  for (Eigen::Index i = 0; i < q.cols(); ++i) actions[i] = greedy_action(q.col(i));
  return actions;
}

namespace {

using env::Cell;

// First move of a shortest path from `from` to any goal cell, avoiding
// blocked cells; Noop when unreachable or already there.
int first_step_towards(Cell from, const std::vector<Cell>& goals, const std::vector<std::vector<bool>>& blocked,
                       int g) {
  for (const auto& goal : goals)
    if (goal.x == from.x && goal.y == from.y) return static_cast<int>(env::LbfAction::Noop);
  // Actions 1..4: north (y-1), south (y+1), west (x-1), east (x+1).
  constexpr int dx[] = {0, 0, -1, 1};
  constexpr int dy[] = {-1, 1, 0, 0};
  std::vector<std::vector<int>> first(g, std::vector<int>(g, -1));
  std::deque<Cell> frontier;
  first[from.y][from.x] = 0;
  frontier.push_back(from);
  while (!frontier.empty()) {
    const Cell c = frontier.front();
    frontier.pop_front();
    for (int d = 0; d < 4; ++d) {
      const Cell n{c.x + dx[d], c.y + dy[d]};
      if (n.x < 0 || n.y < 0 || n.x >= g || n.y >= g || blocked[n.y][n.x] || first[n.y][n.x] != -1) continue;
      first[n.y][n.x] = (c.x == from.x && c.y == from.y) ? d + 1 : first[c.y][c.x];
      for (const auto& goal : goals)
        if (goal.x == n.x && goal.y == n.y) return first[n.y][n.x];
      frontier.push_back(n);
    }
  }
  return static_cast<int>(env::LbfAction::Noop);
}

Cell step_cell(Cell c, int action) {
  switch (static_cast<env::LbfAction>(action)) {
    case env::LbfAction::North: return {c.x, c.y - 1};
    case env::LbfAction::South: return {c.x, c.y + 1};
    case env::LbfAction::West: return {c.x - 1, c.y};
    case env::LbfAction::East: return {c.x + 1, c.y};
    default: return c;
  }
}

}  // namespace

std::vector<int> ScriptedLbfPolicy::act(const env::MultiAgentEnv& task) {
  const auto* lbf = dynamic_cast<const env::LbfTask*>(&task);
  if (!lbf) throw std::invalid_argument("ScriptedLbfPolicy needs a foraging task");
  const auto& e = lbf->raw();
  const int g = e.config().grid_size;
  const auto& agents = e.agents();
  const auto& foods = e.foods();

  int target = -1;
  int best = 1 << 30;
  for (std::size_t f = 0; f < foods.size(); ++f) {
    if (foods[f].collected) continue;
    const int d = std::abs(foods[f].pos.x - agents[0].pos.x) + std::abs(foods[f].pos.y - agents[0].pos.y);
    if (d < best) {
      best = d;
      target = static_cast<int>(f);
    }
  }
  std::vector<int> actions(agents.size(), static_cast<int>(env::LbfAction::Noop));
  if (target < 0) return actions;
  const Cell food = foods[target].pos;

  std::vector<std::vector<bool>> foods_grid(g, std::vector<bool>(g, false));
  for (const auto& f : foods)
    if (!f.collected) foods_grid[f.pos.y][f.pos.x] = true;

  // Cells already claimed by a lower-index agent's move this step; two agents
  // stepping into the same cell would both stay put, forever.
  std::vector<Cell> claimed;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const Cell pos = agents[i].pos;
    if (env::adjacent4(pos, food)) {
      actions[i] = static_cast<int>(env::LbfAction::Pickup);
      continue;
    }
    auto blocked = foods_grid;
    for (std::size_t j = 0; j < agents.size(); ++j)
      if (j != i) blocked[agents[j].pos.y][agents[j].pos.x] = true;
    for (const Cell c : claimed) blocked[c.y][c.x] = true;
    std::vector<Cell> goals;
    for (const Cell c : {Cell{food.x, food.y - 1}, Cell{food.x, food.y + 1}, Cell{food.x - 1, food.y},
                         Cell{food.x + 1, food.y}})
      if (c.x >= 0 && c.y >= 0 && c.x < g && c.y < g && !blocked[c.y][c.x]) goals.push_back(c);
    actions[i] = first_step_towards(pos, goals, blocked, g);
    claimed.push_back(step_cell(pos, actions[i]));
  }
  return actions;
}

EvalResult evaluate_policy(Policy& policy, const env::MultiAgentEnv& prototype, int episodes, std::uint64_t seed) {
  if (episodes < 1) throw std::invalid_argument("evaluate_policy needs at least one episode");
  auto env = prototype.clone();
  double total_return = 0.0;
  int successes = 0;
  for (int e = 0; e < episodes; ++e) {
    env->reset(seed + static_cast<std::uint64_t>(e));
    double ret = 0.0;
    for (;;) {
      const auto actions = policy.act(*env);
      const auto step = env->step(actions);
      ret += step.reward;
      if (step.done) break;
    }
    total_return += ret;
    if (env->success()) ++successes;
  }
  return {total_return / episodes, static_cast<double>(successes) / episodes};
}

}  // namespace credit::train
