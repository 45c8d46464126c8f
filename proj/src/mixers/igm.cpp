#include "credit/mixers/igm.hpp"

#include <algorithm>
#include <limits>

namespace credit::mix {
namespace {

constexpr Eigen::Index kChunk = 4096;

}  // namespace

namespace {

struct Scan {
  long long best_index = 0;
  double best = -std::numeric_limits<double>::infinity();
  double probe_value = -std::numeric_limits<double>::infinity();
};

long long joint_count(const std::vector<Eigen::VectorXd>& q_tables) {
  long long joints = 1;
  for (const auto& t : q_tables) {
    if (t.size() == 0) throw std::invalid_argument("igm_check: empty q-table");
    joints *= t.size();
    if (joints > kMaxJointActions) throw JointSpaceTooLarge();
  }
  return joints;
}

std::vector<int> decode(const std::vector<Eigen::VectorXd>& q_tables, long long index) {
  std::vector<int> actions(q_tables.size());
  for (std::size_t i = q_tables.size(); i-- > 0;) {
    const auto size = q_tables[i].size();
    actions[i] = static_cast<int>(index % size);
    index /= size;
  }
  return actions;
}

// Mixes every joint action once, tracking the lowest-index maximum and the
// value at `probe` (a joint index, or -1).
Scan scan(const MixerSpec& spec, const Eigen::VectorXd& state, const std::vector<Eigen::VectorXd>& q_tables,
          long long probe) {
  const int n = static_cast<int>(q_tables.size());
  const long long joints = joint_count(q_tables);
  Scan out;
  for (long long start = 0; start < joints; start += kChunk) {
    const Eigen::Index count = static_cast<Eigen::Index>(std::min<long long>(kChunk, joints - start));
    Eigen::MatrixXd q(n, count);
    for (Eigen::Index c = 0; c < count; ++c) {
      const auto actions = decode(q_tables, start + c);
      for (int i = 0; i < n; ++i) q(i, c) = q_tables[static_cast<std::size_t>(i)][actions[static_cast<std::size_t>(i)]];
    }
    const auto mixed = mix_batch(spec, q, state.replicate(1, count));
    for (Eigen::Index c = 0; c < count; ++c) {
      if (mixed.q_tot(c) > out.best) {
        out.best = mixed.q_tot(c);
        out.best_index = start + c;
      }
      if (start + c == probe) out.probe_value = mixed.q_tot(c);
    }
  }
  return out;
}

}  // namespace

std::vector<int> joint_argmax(const MixerSpec& spec, const Eigen::VectorXd& state,
                              const std::vector<Eigen::VectorXd>& q_tables) {
  return decode(q_tables, scan(spec, state, q_tables, -1).best_index);
}

bool igm_check(const MixerSpec& spec, const Eigen::VectorXd& state, const std::vector<Eigen::VectorXd>& q_tables) {
  long long local_index = 0;
  for (const auto& t : q_tables) {
    if (t.size() == 0) throw std::invalid_argument("igm_check: empty q-table");
    Eigen::Index a;
    t.maxCoeff(&a);
    local_index = local_index * t.size() + a;
  }
  const auto s = scan(spec, state, q_tables, local_index);
  return s.probe_value >= s.best;
}

}  // namespace credit::mix
