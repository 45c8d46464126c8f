#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "credit/mixers/mixer.hpp"

namespace credit::mix {

class JointSpaceTooLarge : public std::invalid_argument {
 public:
  JointSpaceTooLarge() : std::invalid_argument("JointSpaceTooLarge: joint action space exceeds 1e6") {}
};

inline constexpr long long kMaxJointActions = 1'000'000;

// Brute-force IGM test at one state: does the tuple of per-agent argmaxes
// attain the maximum mixed value over the joint action space? Ties count as
// agreement, so a weight small enough to vanish in rounding is not a failure.
bool igm_check(const MixerSpec& spec, const Eigen::VectorXd& state, const std::vector<Eigen::VectorXd>& q_tables);

// Lowest-index joint argmax of the mixed value, as per-agent actions.
std::vector<int> joint_argmax(const MixerSpec& spec, const Eigen::VectorXd& state,
                              const std::vector<Eigen::VectorXd>& q_tables);

}  // namespace credit::mix
