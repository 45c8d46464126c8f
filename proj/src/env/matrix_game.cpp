#include "credit/env/matrix_game.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace credit::env {
namespace {

void flatten_into(const nlohmann::json& j, std::vector<double>& out) {
  if (j.is_array()) {
    for (const auto& e : j) flatten_into(e, out);
  } else {
    out.push_back(j.get<double>());
  }
}

void flatten_into(const nlohmann::json& j, std::vector<int>& out) {
  if (j.is_array()) {
    for (const auto& e : j) flatten_into(e, out);
  } else {
    out.push_back(j.get<int>());
  }
}

}  // namespace

int MatrixGame::joint_count() const {
  int count = 1;
  for (int i = 0; i < n_agents; ++i) count *= n_actions;
  return count;
}

int MatrixGame::joint_index(std::span<const int> actions) const {
  if (static_cast<int>(actions.size()) != n_agents)
    throw std::out_of_range("joint action length does not match n_agents");
  int index = 0;
  for (int a : actions) {
    if (a < 0 || a >= n_actions) throw std::out_of_range("action index out of range");
    index = index * n_actions + a;
  }
  return index;
}

std::vector<int> MatrixGame::joint_actions(int index) const {
  std::vector<int> actions(static_cast<std::size_t>(n_agents));
  for (int i = n_agents - 1; i >= 0; --i) {
    actions[static_cast<std::size_t>(i)] = index % n_actions;
    index /= n_actions;
  }
  return actions;
}

void MatrixGame::validate() const {
  if (n_states < 1 || n_agents < 1 || n_actions < 1)
    throw std::invalid_argument("MatrixGame: sizes must be positive");
  const int joints = joint_count();
  if (payoff.rows() != n_states || payoff.cols() != joints)
    throw std::invalid_argument("MatrixGame: payoff must be n_states x joint_count");
  if (!payoff.allFinite()) throw std::invalid_argument("MatrixGame: payoff must be finite");
  if (static_cast<int>(transition.size()) != n_states ||
      static_cast<int>(terminal.size()) != n_states)
    throw std::invalid_argument("MatrixGame: transition/terminal must have n_states rows");
  for (const auto& row : transition) {
    if (static_cast<int>(row.size()) != joints)
      throw std::invalid_argument("MatrixGame: transition row must have joint_count entries");
    for (int next : row)
      if (next < 0 || next >= n_states)
        throw std::invalid_argument("MatrixGame: transition index out of range");
  }
  if (initial_state < 0 || initial_state >= n_states)
    throw std::invalid_argument("MatrixGame: initial_state out of range");
}

MatrixGame MatrixGame::from_json(const nlohmann::json& j) {
  MatrixGame g;
  g.n_states = j.at("n_states").get<int>();
  g.n_agents = j.at("n_agents").get<int>();
  g.n_actions = j.at("n_actions").get<int>();
  g.initial_state = j.value("initial_state", 0);
  const int joints = g.joint_count();

  std::vector<double> pay;
  flatten_into(j.at("payoff"), pay);
  if (static_cast<int>(pay.size()) != g.n_states * joints)
    throw std::invalid_argument("MatrixGame: payoff has " + std::to_string(pay.size()) +
                                " entries, expected " + std::to_string(g.n_states * joints));
  g.payoff.resize(g.n_states, joints);
  for (int s = 0; s < g.n_states; ++s)
    for (int a = 0; a < joints; ++a) g.payoff(s, a) = pay[static_cast<std::size_t>(s * joints + a)];

  g.transition.assign(static_cast<std::size_t>(g.n_states), std::vector<int>(joints, 0));
  if (j.contains("transition")) {
    std::vector<int> tr;
    flatten_into(j.at("transition"), tr);
    if (static_cast<int>(tr.size()) != g.n_states * joints)
      throw std::invalid_argument("MatrixGame: transition has wrong entry count");
    for (int s = 0; s < g.n_states; ++s)
      for (int a = 0; a < joints; ++a)
        g.transition[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] =
            tr[static_cast<std::size_t>(s * joints + a)];
  }
  g.terminal.assign(static_cast<std::size_t>(g.n_states), false);
  if (j.contains("terminal")) {
    const auto& t = j.at("terminal");
    if (!t.is_array() || static_cast<int>(t.size()) != g.n_states)
      throw std::invalid_argument("MatrixGame: terminal must list n_states booleans");
    for (int s = 0; s < g.n_states; ++s) g.terminal[static_cast<std::size_t>(s)] = t[s].get<bool>();
  }
  g.validate();
  return g;
}

nlohmann::json MatrixGame::to_json() const {
  nlohmann::json j;
  j["n_states"] = n_states;
  j["n_agents"] = n_agents;
  j["n_actions"] = n_actions;
  j["initial_state"] = initial_state;
  auto pay = nlohmann::json::array();
  for (int s = 0; s < n_states; ++s) {
    auto row = nlohmann::json::array();
    for (int a = 0; a < payoff.cols(); ++a) row.push_back(payoff(s, a));
    pay.push_back(row);
  }
  j["payoff"] = pay;
  j["transition"] = transition;
  j["terminal"] = terminal;
  return j;
}

int matrix_reset(const MatrixGame& game) { return game.initial_state; }

MatrixStep matrix_step(const MatrixGame& game, int state, std::span<const int> joint_action) {
  if (state < 0 || state >= game.n_states) throw std::out_of_range("state index out of range");
  const int joint = game.joint_index(joint_action);
  const int next = game.transition[static_cast<std::size_t>(state)][static_cast<std::size_t>(joint)];
  return {next, game.payoff(state, joint), static_cast<bool>(game.terminal[static_cast<std::size_t>(next)])};
}

Eigen::MatrixXd bellman_backup(const MatrixGame& game, const Eigen::MatrixXd& q, double gamma) {
  const Eigen::VectorXd v = q.rowwise().maxCoeff();
  Eigen::MatrixXd out(q.rows(), q.cols());
  for (int s = 0; s < game.n_states; ++s) {
    for (int a = 0; a < q.cols(); ++a) {
      const int next = game.transition[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
      const double cont = game.terminal[static_cast<std::size_t>(next)] ? 0.0 : v[next];
      out(s, a) = game.payoff(s, a) + gamma * cont;
    }
  }
  return out;
}

Eigen::MatrixXd oracle_joint_q(const MatrixGame& game, double gamma) {
  game.validate();
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must be in [0, 1)");
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(game.n_states, game.joint_count());
  constexpr int kMaxIterations = 10'000'000;
  for (int it = 0; it < kMaxIterations; ++it) {
    Eigen::MatrixXd next = bellman_backup(game, q, gamma);
    const double change = (next - q).cwiseAbs().maxCoeff();
    q = std::move(next);
    if (change < 1e-10) return q;
  }
  throw std::runtime_error("oracle_joint_q: value iteration did not converge");
}

}  // namespace credit::env
