#include "credit/env/multi_agent_env.hpp"

#include <stdexcept>

namespace credit::env {

EnvStep LbfTask::step(std::span<const int> actions) {
  const LbfStep r = env_.step(actions);
  return {r.reward, r.done, env_.all_collected()};
}

MatrixTask::MatrixTask(MatrixGame game, int horizon) : game_(std::move(game)), horizon_(horizon) {
  game_.validate();
  if (horizon_ < 1) throw std::invalid_argument("MatrixTask: horizon must be >= 1");
  last_actions_.assign(static_cast<std::size_t>(game_.n_agents), -1);
}

void MatrixTask::reset(std::uint64_t) {
  current_ = matrix_reset(game_);
  steps_ = 0;
  reached_terminal_ = false;
  last_actions_.assign(static_cast<std::size_t>(game_.n_agents), -1);
}

EnvStep MatrixTask::step(std::span<const int> actions) {
  const MatrixStep r = matrix_step(game_, current_, actions);
  current_ = r.next_state;
  ++steps_;
  reached_terminal_ = r.done;
  last_actions_.assign(actions.begin(), actions.end());
  return {r.reward, r.done || steps_ >= horizon_, r.done};
}

Eigen::VectorXd MatrixTask::state() const {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(game_.n_states);
  s[current_] = 1.0;
  return s;
}

}  // namespace credit::env
