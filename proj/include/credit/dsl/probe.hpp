#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "credit/dsl/ast.hpp"
#include "credit/env/lbf.hpp"

namespace credit::dsl {

// Source of plausible global states for probing a program.
class StateSampler {
 public:
  virtual ~StateSampler() = default;
  virtual int state_dim() const = 0;
  // Largest coordinate value the environment can emit; used for the
  // max-coordinate boundary state.
  virtual double max_coordinate() const = 0;
  virtual Eigen::VectorXd sample(std::mt19937_64& rng) const = 0;
};

// States visited by uniformly random joint actions after a seeded reset.
class LbfStateSampler final : public StateSampler {
 public:
  explicit LbfStateSampler(env::LbfConfig config);
  int state_dim() const override { return config_.state_dim(); }
  double max_coordinate() const override { return config_.grid_size - 1; }
  Eigen::VectorXd sample(std::mt19937_64& rng) const override;

 private:
  env::LbfConfig config_;
};

class FunctionSampler final : public StateSampler {
 public:
  using Fn = std::function<Eigen::VectorXd(std::mt19937_64&)>;
  FunctionSampler(int state_dim, double max_coordinate, Fn fn)
      : state_dim_(state_dim), max_coordinate_(max_coordinate), fn_(std::move(fn)) {}
  int state_dim() const override { return state_dim_; }
  double max_coordinate() const override { return max_coordinate_; }
  Eigen::VectorXd sample(std::mt19937_64& rng) const override { return fn_(rng); }

 private:
  int state_dim_;
  double max_coordinate_;
  Fn fn_;
};

struct ProbeFailure {
  std::string state_digest;
  std::string kind;
  std::string message;
};

struct WeightStat {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

struct ProbeReport {
  int n_probes = 0;
  int failure_count = 0;
  // First failures in probe order (at most kMaxRecordedFailures).
  std::vector<ProbeFailure> failures;
  std::vector<WeightStat> weight_stats;  // per agent, over successful probes
  bool negative_weight_seen = false;

  static constexpr std::size_t kMaxRecordedFailures = 16;
  bool clean() const { return failure_count == 0; }
};

// Evaluates a validated program on n_probes states: first the boundary
// states (all zeros, all -1, all max_coordinate), then states drawn from the
// sampler with a generator seeded by `seed`.
ProbeReport probe(const Program& program, const StateSampler& sampler, int n_probes, std::uint64_t seed);

std::vector<Eigen::VectorXd> boundary_states(int state_dim, double max_coordinate);

}  // namespace credit::dsl
