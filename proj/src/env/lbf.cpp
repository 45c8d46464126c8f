#include "credit/env/lbf.hpp"

#include <algorithm>
#include <cstdlib>
#include <random>
#include <string>

namespace credit::env {
namespace {

constexpr int kMaxPlacementAttempts = 200;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("invalid LbfConfig: " + what);
}

int chebyshev(Cell a, Cell b) { return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y)); }

Cell moved(Cell c, int action) {
  switch (static_cast<LbfAction>(action)) {
    case LbfAction::North: return {c.x, c.y - 1};
    case LbfAction::South: return {c.x, c.y + 1};
    case LbfAction::West: return {c.x - 1, c.y};
    case LbfAction::East: return {c.x + 1, c.y};
    default: return c;
  }
}

void put_triple(Eigen::VectorXd& v, Eigen::Index at, double x, double y, double level) {
  v[at] = x;
  v[at + 1] = y;
  v[at + 2] = level;
}

}  // namespace

void LbfConfig::validate() const {
  require(grid_size >= 4, "grid_size must be >= 4");
  require(n_agents >= 1, "n_agents must be >= 1");
  require(n_foods >= 1, "n_foods must be >= 1");
  require(sight_radius >= 0, "sight_radius must be >= 0");
  require(max_steps >= 1, "max_steps must be >= 1");
  require(level_max >= 1, "level_max must be >= 1");
  // Foods need interior cells with a one-cell gap between them.
  const int lane = (grid_size - 1) / 2;
  require(n_foods <= lane * lane, "too many foods for the grid");
  require(n_agents + n_foods <= grid_size * grid_size, "entities do not fit on the grid");
}

LbfEnv::LbfEnv(LbfConfig config) : config_(config) {
  config_.validate();
  agents_.resize(config_.n_agents);
  foods_.resize(config_.n_foods);
}

bool LbfEnv::in_grid(Cell c) const {
  return c.x >= 0 && c.y >= 0 && c.x < config_.grid_size && c.y < config_.grid_size;
}

bool LbfEnv::food_at(Cell c) const {
  return std::any_of(foods_.begin(), foods_.end(),
                     [&](const Food& f) { return !f.collected && f.pos == c; });
}

bool LbfEnv::agent_at(Cell c) const {
  return std::any_of(agents_.begin(), agents_.end(), [&](const Agent& a) { return a.pos == c; });
}

LbfStep LbfEnv::reset(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int g = config_.grid_size;
  std::uniform_int_distribution<int> level_dist(1, config_.level_max);

  int level_sum = 0;
  for (auto& a : agents_) {
    a.level = level_dist(rng);
    a.last_action = -1;
    level_sum += a.level;
  }

  std::vector<Cell> interior;
  for (int y = 1; y < g - 1; ++y)
    for (int x = 1; x < g - 1; ++x) interior.push_back({x, y});

  bool placed = false;
  for (int attempt = 0; attempt < kMaxPlacementAttempts && !placed; ++attempt) {
    std::shuffle(interior.begin(), interior.end(), rng);
    std::size_t next = 0;
    placed = true;
    for (auto& f : foods_) {
      bool found = false;
      while (next < interior.size() && !found) {
        const Cell c = interior[next++];
        found = std::none_of(foods_.begin(), foods_.begin() + (&f - foods_.data()),
                             [&](const Food& o) { return chebyshev(o.pos, c) <= 1; });
        if (found) f.pos = c;
      }
      if (!found) {
        placed = false;
        break;
      }
    }
  }
  if (!placed) throw std::runtime_error("LbfEnv::reset: could not place foods");

  const int food_cap = std::min(config_.level_max, level_sum);
  std::uniform_int_distribution<int> food_level_dist(1, food_cap);
  for (auto& f : foods_) {
    f.level = config_.coop ? level_sum : food_level_dist(rng);
    f.collected = false;
  }

  std::vector<Cell> free_cells;
  for (int y = 0; y < g; ++y)
    for (int x = 0; x < g; ++x)
      if (!food_at({x, y})) free_cells.push_back({x, y});
  std::shuffle(free_cells.begin(), free_cells.end(), rng);
  for (std::size_t i = 0; i < agents_.size(); ++i) agents_[i].pos = free_cells[i];

  steps_ = 0;
  done_ = false;
  return {global_state(), observations(), 0.0, false};
}

void LbfEnv::set_layout(std::vector<Agent> agents, std::vector<Food> foods) {
  if (static_cast<int>(agents.size()) != config_.n_agents ||
      static_cast<int>(foods.size()) != config_.n_foods)
    throw std::invalid_argument("set_layout: entity counts do not match config");
  agents_ = std::move(agents);
  foods_ = std::move(foods);
  for (auto& a : agents_) a.last_action = -1;
  steps_ = 0;
  done_ = all_collected();
}

LbfStep LbfEnv::step(std::span<const int> joint_action) {
  if (done_) throw StepAfterDone();
  if (static_cast<int>(joint_action.size()) != config_.n_agents)
    throw std::invalid_argument("joint action length " + std::to_string(joint_action.size()) +
                                " != n_agents " + std::to_string(config_.n_agents));
  for (int a : joint_action)
    if (a < 0 || a >= kLbfActions)
      throw std::invalid_argument("action " + std::to_string(a) + " outside [0, 5]");

  const auto pickup = static_cast<int>(LbfAction::Pickup);

  // Collection uses positions at the start of the step; pickers never move.
  double reward = 0.0;
  std::vector<bool> collect(foods_.size(), false);
  for (std::size_t f = 0; f < foods_.size(); ++f) {
    if (foods_[f].collected) continue;
    int group_level = 0;
    for (std::size_t i = 0; i < agents_.size(); ++i)
      if (joint_action[i] == pickup && adjacent4(agents_[i].pos, foods_[f].pos))
        group_level += agents_[i].level;
    if (group_level > 0 && group_level >= foods_[f].level) collect[f] = true;
  }

  // Moves into walls, foods or any cell occupied at step start are no-ops;
  // agents that target the same free cell all stay.
  std::vector<Cell> target(agents_.size());
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const Cell from = agents_[i].pos;
    const Cell to = moved(from, joint_action[i]);
    target[i] = (to == from || !in_grid(to) || food_at(to) || agent_at(to)) ? from : to;
  }
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    if (target[i] == agents_[i].pos) continue;
    bool contested = false;
    for (std::size_t j = 0; j < agents_.size(); ++j)
      if (j != i && target[j] == target[i]) contested = true;
    if (!contested) agents_[i].pos = target[i];
  }

  for (std::size_t f = 0; f < foods_.size(); ++f) {
    if (!collect[f]) continue;
    foods_[f].collected = true;
    reward += foods_[f].level;
  }
  for (std::size_t i = 0; i < agents_.size(); ++i) agents_[i].last_action = joint_action[i];

  ++steps_;
  done_ = all_collected() || steps_ >= config_.max_steps;
  return {global_state(), observations(), reward, done_};
}

bool LbfEnv::all_collected() const {
  return std::all_of(foods_.begin(), foods_.end(), [](const Food& f) { return f.collected; });
}

double LbfEnv::total_food_level() const {
  double total = 0.0;
  for (const auto& f : foods_) total += f.level;
  return total;
}

Eigen::VectorXd LbfEnv::global_state() const {
  Eigen::VectorXd s(config_.state_dim());
  Eigen::Index at = 0;
  for (const auto& a : agents_) {
    put_triple(s, at, a.pos.x, a.pos.y, a.level);
    at += 3;
  }
  for (const auto& f : foods_) {
    if (f.collected)
      put_triple(s, at, -1, -1, 0);
    else
      put_triple(s, at, f.pos.x, f.pos.y, f.level);
    at += 3;
  }
  for (const auto& a : agents_) s[at++] = a.last_action;
  return s;
}

Eigen::VectorXd LbfEnv::observation(int agent) const {
  const Agent& self = agents_.at(static_cast<std::size_t>(agent));
  const int r = config_.sight_radius;
  Eigen::VectorXd o(config_.obs_dim());
  Eigen::Index at = 0;
  put_triple(o, at, self.pos.x, self.pos.y, self.level);
  at += 3;
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    if (static_cast<int>(i) == agent) continue;
    const Agent& other = agents_[i];
    if (chebyshev(self.pos, other.pos) <= r)
      put_triple(o, at, other.pos.x, other.pos.y, other.level);
    else
      put_triple(o, at, -1, -1, 0);
    at += 3;
  }
  for (const auto& f : foods_) {
    if (!f.collected && chebyshev(self.pos, f.pos) <= r)
      put_triple(o, at, f.pos.x, f.pos.y, f.level);
    else
      put_triple(o, at, -1, -1, 0);
    at += 3;
  }
  return o;
}

std::vector<Eigen::VectorXd> LbfEnv::observations() const {
  std::vector<Eigen::VectorXd> out;
  out.reserve(agents_.size());
  for (int i = 0; i < config_.n_agents; ++i) out.push_back(observation(i));
  return out;
}

}  // namespace credit::env
