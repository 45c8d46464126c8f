#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "credit/autodiff/checkpoint.hpp"
#include "credit/env/multi_agent_env.hpp"
#include "credit/mixers/mixer.hpp"
#include "credit/trainer/learner.hpp"

namespace credit::train {

struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.05;
  std::int64_t anneal_steps = 50'000;

  // Linear from start to end over anneal_steps, then flat.
  double at(std::int64_t step) const;
};

struct TrainConfig {
  double gamma = 0.99;
  int batch_size = 32;
  std::size_t buffer_capacity = 50'000;
  double lr = 5e-4;
  std::int64_t target_update_interval = 200;
  EpsilonSchedule epsilon;
  std::int64_t total_steps = 200'000;
  std::int64_t warmup_steps = 1'000;
  std::int64_t eval_interval = 5'000;
  int eval_episodes = 32;
  std::int64_t log_interval = 1'000;
  std::uint64_t seed = 0;
  std::vector<int> hidden = {64};
  double grad_clip = 10.0;
  // Divide rewards by the episode's total food level so a full clear returns 1.
  bool normalize_returns = false;
  // Stop after the first evaluation whose success rate reaches this value; 0 disables.
  double stop_at_success = 0.0;

  void validate() const;
};

struct MetricsRow {
  std::int64_t env_step = 0;
  std::optional<double> loss;  // mean over updates since the previous row
  double epsilon = 0.0;
  std::optional<double> eval_mean_return;
  std::optional<double> eval_success_rate;
};

class MetricsLog {
 public:
  static constexpr const char* kHeader = "env_step,loss,epsilon,eval_mean_return,eval_success_rate";

  // Throws std::logic_error unless env_step is strictly increasing.
  void add(MetricsRow row);
  const std::vector<MetricsRow>& rows() const { return rows_; }

  std::string to_csv() const;
  void write_csv(const std::filesystem::path& path) const;

 private:
  std::vector<MetricsRow> rows_;
};

struct TrainResult {
  MetricsLog log;
  ad::MlpParams<double> agent;
  mix::MixerSpec mixer;
  std::int64_t steps_run = 0;
  std::int64_t episodes = 0;
  std::int64_t updates = 0;
  // First evaluation step whose success rate reached stop_at_success.
  std::optional<std::int64_t> threshold_step;
  // Acting steps on which a TFCAF mixer produced a negative weight, and the
  // episodes in which that happened.
  std::int64_t negative_weight_steps = 0;
  std::vector<std::int64_t> negative_weight_episodes;

  ad::Checkpoint checkpoint(std::uint64_t seed) const;
};

// Shared agent network for an environment, Glorot-initialised from `seed`.
ad::MlpParams<double> init_agent(const env::MultiAgentEnv& env, const std::vector<int>& hidden, std::uint64_t seed);

using RowCallback = std::function<void(const MetricsRow&)>;

// Epsilon-greedy acting, replay, one TD update per step after warmup, target
// sync every target_update_interval steps and greedy evaluation every
// eval_interval steps. Deterministic given config.seed.
TrainResult run_training(env::MultiAgentEnv& env, mix::MixerSpec mixer, const TrainConfig& config,
                         const RowCallback& on_row = {});

}  // namespace credit::train
