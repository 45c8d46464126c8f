#pragma once

#include <cstdint>
#include <memory>
#include <span>

#include <Eigen/Core>

#include "credit/env/lbf.hpp"
#include "credit/env/matrix_game.hpp"

namespace credit::env {

struct EnvStep {
  double reward = 0.0;
  bool done = false;        // episode over (terminal or horizon)
  bool terminated = false;  // true terminal; horizon cut-offs keep bootstrapping
};

// Uniform view of a cooperative task for the trainer.
class MultiAgentEnv {
 public:
  virtual ~MultiAgentEnv() = default;

  virtual int n_agents() const = 0;
  virtual int n_actions() const = 0;
  virtual int state_dim() const = 0;
  virtual int obs_dim() const = 0;

  virtual void reset(std::uint64_t seed) = 0;
  virtual EnvStep step(std::span<const int> actions) = 0;

  virtual Eigen::VectorXd state() const = 0;
  virtual Eigen::VectorXd observation(int agent) const = 0;
  virtual bool success() const = 0;
  virtual int last_action(int agent) const = 0;

  // Fresh instance with the same configuration.
  virtual std::unique_ptr<MultiAgentEnv> clone() const = 0;
};

class LbfTask final : public MultiAgentEnv {
 public:
  explicit LbfTask(LbfConfig config) : env_(config) {}

  int n_agents() const override { return env_.config().n_agents; }
  int n_actions() const override { return kLbfActions; }
  int state_dim() const override { return env_.config().state_dim(); }
  int obs_dim() const override { return env_.config().obs_dim(); }

  void reset(std::uint64_t seed) override { env_.reset(seed); }
  EnvStep step(std::span<const int> actions) override;

  Eigen::VectorXd state() const override { return env_.global_state(); }
  Eigen::VectorXd observation(int agent) const override { return env_.observation(agent); }
  bool success() const override { return env_.all_collected(); }
  int last_action(int agent) const override { return env_.agents().at(agent).last_action; }

  std::unique_ptr<MultiAgentEnv> clone() const override {
    return std::make_unique<LbfTask>(env_.config());
  }

  LbfEnv& raw() { return env_; }
  const LbfEnv& raw() const { return env_; }

 private:
  LbfEnv env_;
};

// Matrix game as an episodic task. State and every observation are the
// one-hot encoding of the current state index; episodes end at a terminal
// state or after `horizon` steps.
class MatrixTask final : public MultiAgentEnv {
 public:
  MatrixTask(MatrixGame game, int horizon);

  int n_agents() const override { return game_.n_agents; }
  int n_actions() const override { return game_.n_actions; }
  int state_dim() const override { return game_.n_states; }
  int obs_dim() const override { return game_.n_states; }

  void reset(std::uint64_t seed) override;
  EnvStep step(std::span<const int> actions) override;

  Eigen::VectorXd state() const override;
  Eigen::VectorXd observation(int) const override { return state(); }
  bool success() const override { return reached_terminal_; }
  int last_action(int agent) const override { return last_actions_.at(agent); }

  std::unique_ptr<MultiAgentEnv> clone() const override {
    return std::make_unique<MatrixTask>(game_, horizon_);
  }

 private:
  MatrixGame game_;
  int horizon_;
  int current_ = 0;
  int steps_ = 0;
  bool reached_terminal_ = false;
  std::vector<int> last_actions_;
};

}  // namespace credit::env
