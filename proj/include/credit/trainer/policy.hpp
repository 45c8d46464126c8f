#pragma once

#include <cstdint>
#include <vector>

#include "credit/autodiff/mlp.hpp"
#include "credit/env/multi_agent_env.hpp"

namespace credit::train {

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::vector<int> act(const env::MultiAgentEnv& env) = 0;
};

// Greedy (epsilon = 0) actions from a shared agent network.
class GreedyQPolicy final : public Policy {
 public:
  explicit GreedyQPolicy(const ad::MlpParams<double>& agent) : agent_(agent) {}
  std::vector<int> act(const env::MultiAgentEnv& env) override;

 private:
  const ad::MlpParams<double>& agent_;
};

// Hand-written foraging policy: every agent heads for the same remaining
// food (the one closest to agent 0), waits on a free adjacent cell, and
// picks up once there. With cooperative food levels this collects every
// food in small grids well within the horizon.
class ScriptedLbfPolicy final : public Policy {
 public:
  std::vector<int> act(const env::MultiAgentEnv& env) override;
};

struct EvalResult {
  double mean_return = 0.0;
  double success_rate = 0.0;
};

// Runs `episodes` episodes on a fresh clone of `env`, resetting episode e
// with seed + e.
EvalResult evaluate_policy(Policy& policy, const env::MultiAgentEnv& env, int episodes, std::uint64_t seed);

}  // namespace credit::train
