#include "credit/oracle/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/QR>

namespace credit::oracle {
namespace {

constexpr double kConstantTol = 1e-12;

// Design rows [Q_1(s,a_1) ... Q_n(s,a_n) 1] for every joint action of state s.
Eigen::MatrixXd design_rows(const env::MatrixGame& game, const Eigen::MatrixXd& util) {
  const int joints = game.joint_count();
  Eigen::MatrixXd x(joints, game.n_agents + 1);
  for (int j = 0; j < joints; ++j) {
    const auto actions = game.joint_actions(j);
    for (int i = 0; i < game.n_agents; ++i) x(j, i) = util(actions[i], i);
    x(j, game.n_agents) = 1.0;
  }
  return x;
}

Eigen::VectorXd min_norm_solve(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(x);
  return cod.solve(y);
}

}  // namespace

bool FitResult::any_degenerate() const { return std::find(degenerate.begin(), degenerate.end(), true) != degenerate.end(); }

std::vector<Eigen::MatrixXd> greedy_utilities(const env::MatrixGame& game, const Eigen::MatrixXd& q_star) {
  std::vector<Eigen::MatrixXd> out;
  for (int s = 0; s < game.n_states; ++s) {
    Eigen::MatrixXd u =
        Eigen::MatrixXd::Constant(game.n_actions, game.n_agents, -std::numeric_limits<double>::infinity());
    for (int j = 0; j < game.joint_count(); ++j) {
      const auto actions = game.joint_actions(j);
      for (int i = 0; i < game.n_agents; ++i) u(actions[i], i) = std::max(u(actions[i], i), q_star(s, j));
    }
    out.push_back(std::move(u));
  }
  return out;
}

FitResult representability_fit(const env::MatrixGame& game, double gamma) {
  game.validate();
  if (game.joint_count() > kMaxFitJointActions)
    throw std::invalid_argument("representability_fit: " + std::to_string(game.joint_count()) +
                                " joint actions per state exceeds " + std::to_string(kMaxFitJointActions));
  const int n = game.n_agents;
  const int joints = game.joint_count();

  FitResult r;
  r.q_star = env::oracle_joint_q(game, gamma);
  const auto utils = greedy_utilities(game, r.q_star);
  r.per_state_weights = Eigen::MatrixXd::Zero(game.n_states, n);
  r.per_state_bias = Eigen::VectorXd::Zero(game.n_states);
  r.per_state_residual = Eigen::VectorXd::Zero(game.n_states);
  r.degenerate.assign(game.n_states, false);
  r.fitted.assign(game.n_states, false);

  std::vector<int> fitted_states;
  for (int s = 0; s < game.n_states; ++s)
    if (!game.terminal[s]) fitted_states.push_back(s);
  if (fitted_states.empty()) throw std::invalid_argument("representability_fit: every state is terminal");

  Eigen::MatrixXd all_x(joints * static_cast<Eigen::Index>(fitted_states.size()), n + 1);
  Eigen::VectorXd all_y(all_x.rows());
  double sq_sum = 0.0;
  Eigen::Index row = 0;
  for (int s : fitted_states) {
    r.fitted[s] = true;
    const Eigen::MatrixXd x = design_rows(game, utils[s]);
    const Eigen::VectorXd y = r.q_star.row(s).transpose();
    all_x.middleRows(row, joints) = x;
    all_y.segment(row, joints) = y;
    row += joints;

    const double spread = (utils[s].colwise().maxCoeff() - utils[s].colwise().minCoeff()).maxCoeff();
    Eigen::VectorXd coef = Eigen::VectorXd::Zero(n + 1);
    if (spread <= kConstantTol * std::max(1.0, utils[s].cwiseAbs().maxCoeff())) {
      r.degenerate[s] = true;
      coef(n) = y.mean();
    } else {
      coef = min_norm_solve(x, y);
    }
    r.per_state_weights.row(s) = coef.head(n).transpose();
    r.per_state_bias(s) = coef(n);
    const double sq = (x * coef - y).squaredNorm();
    r.per_state_residual(s) = std::sqrt(sq / joints);
    sq_sum += sq;
  }
  r.residual_rms = std::sqrt(sq_sum / static_cast<double>(all_y.size()));

  const Eigen::VectorXd shared = min_norm_solve(all_x, all_y);
  r.constant_weights = shared.head(n);
  r.constant_bias = shared(n);
  r.constant_weight_residual_rms = std::sqrt((all_x * shared - all_y).squaredNorm() / static_cast<double>(all_y.size()));
  return r;
}

}  // namespace credit::oracle
