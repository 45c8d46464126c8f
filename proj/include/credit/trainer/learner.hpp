#pragma once

#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "credit/autodiff/mlp.hpp"
#include "credit/autodiff/rmsprop.hpp"
#include "credit/env/multi_agent_env.hpp"
#include "credit/mixers/mixer.hpp"
#include "credit/trainer/replay.hpp"

namespace credit::train {

class NonFiniteLoss : public std::runtime_error {
 public:
  explicit NonFiniteLoss(const std::string& batch_digest)
      : std::runtime_error("NonFiniteLoss: TD loss is not finite [batch " + batch_digest + "]"),
        batch_digest_(batch_digest) {}
  const std::string& batch_digest() const { return batch_digest_; }

 private:
  std::string batch_digest_;
};

using Batch = std::span<const Transition* const>;

// Agent-network input: observation, one-hot of the agent's last action (all
// zero before the first step) and one-hot agent id. Parameters are shared by
// all agents.
int agent_input_dim(int obs_dim, int n_actions, int n_agents);
Eigen::MatrixXd encode_agent_inputs(const env::MultiAgentEnv& env);  // input_dim x n_agents

// Q-values for every agent: n_actions x n_agents.
Eigen::MatrixXd agent_q_values(const ad::MlpParams<double>& agent, const Eigen::MatrixXd& inputs);

int greedy_action(const Eigen::Ref<const Eigen::VectorXd>& q);

// Per agent: a uniform random action with probability epsilon, otherwise the
// lowest-index argmax of its column of q (n_actions x n_agents).
std::vector<int> epsilon_greedy(const Eigen::MatrixXd& q, double epsilon, std::mt19937_64& rng);

// y = r for terminal items, else r + gamma * mix(per-agent target maxima, s').
Eigen::RowVectorXd td_targets(Batch batch, const ad::MlpParams<double>& target_agent,
                              const mix::MixerSpec& target_mixer, double gamma);

struct LossGradients {
  double loss = 0.0;
  Eigen::RowVectorXd q_tot;
  ad::MlpParams<double> agent;
  std::vector<ad::MlpParams<double>> mixer;  // empty for parameter-free mixers
};

// loss = mean_b (y_b - Q_tot(s_b, a_b))^2 and its gradients. The agent
// gradient flows through dQ_tot/dQ_i from the mixer.
LossGradients loss_and_gradients(Batch batch, const Eigen::RowVectorXd& targets, const ad::MlpParams<double>& agent,
                                 const mix::MixerSpec& mixer);

std::string batch_digest(Batch batch);

struct LearnerConfig {
  double gamma = 0.99;
  double lr = 5e-4;
  double grad_clip = 10.0;  // global norm; 0 disables
};

struct StepStats {
  double loss = 0.0;
  double grad_norm = 0.0;
};

// Online and target parameters plus optimizer state.
class Learner {
 public:
  Learner(ad::MlpParams<double> agent, mix::MixerSpec mixer, LearnerConfig config);

  StepStats train_step(Batch batch);
  void sync_target();

  const ad::MlpParams<double>& agent() const { return agent_; }
  const ad::MlpParams<double>& target_agent() const { return target_agent_; }
  const mix::MixerSpec& mixer() const { return mixer_; }
  const mix::MixerSpec& target_mixer() const { return target_mixer_; }
  const LearnerConfig& config() const { return config_; }

 private:
  ad::MlpParams<double> agent_;
  ad::MlpParams<double> target_agent_;
  mix::MixerSpec mixer_;
  mix::MixerSpec target_mixer_;
  LearnerConfig config_;
  ad::RmsPropState<double> agent_opt_;
  std::vector<ad::RmsPropState<double>> mixer_opt_;
};

}  // namespace credit::train
