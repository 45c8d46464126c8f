#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "credit/dsl/ast.hpp"
#include "credit/mixers/monotonic.hpp"

namespace credit::mix {

struct VdnSum {};

// Fixed, parameter-free mixer backed by a validated TFCAF program.
struct Tfcaf {
  std::shared_ptr<const dsl::Program> program;
};

using MixerSpec = std::variant<VdnSum, MonotonicHypernet<double>, Tfcaf>;

std::string mixer_kind(const MixerSpec& spec);

struct MixOutput {
  double q_tot = 0.0;
  Eigen::VectorXd dq;  // d q_tot / d q_i
  std::vector<ad::MlpParams<double>> state_param_grads;  // empty unless learnable
};

struct MixBatch {
  Eigen::RowVectorXd q_tot;
  Eigen::MatrixXd dq;  // n x batch
  std::vector<ad::MlpParams<double>> param_grads;  // upstream-weighted, learnable mixers only
};

// q is n_agents x batch, states state_dim x batch. When `upstream` is given,
// learnable mixers also return sum_b upstream_b * d q_tot_b / d theta.
MixBatch mix_batch(const MixerSpec& spec, const Eigen::MatrixXd& q, const Eigen::MatrixXd& states,
                   const Eigen::RowVectorXd* upstream = nullptr);

MixOutput mix(const MixerSpec& spec, const Eigen::VectorXd& q, const Eigen::VectorXd& state);

std::int64_t learnable_param_count(const MixerSpec& spec);

// Builds a TFCAF mixer from a program that validated for (n_agents, state_dim).
MixerSpec make_tfcaf(dsl::Program program);

}  // namespace credit::mix
