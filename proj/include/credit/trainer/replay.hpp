#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include <Eigen/Core>

namespace credit::train {

// obs and next_obs hold the agent-network inputs, one column per agent.
// done marks a true terminal; horizon cut-offs are stored with done = false.
struct Transition {
  Eigen::VectorXd state;
  Eigen::MatrixXd obs;
  std::vector<int> actions;
  double reward = 0.0;
  Eigen::VectorXd next_state;
  Eigen::MatrixXd next_obs;
  bool done = false;
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  // Appends, evicting the oldest transition once full.
  void push(Transition t);

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  // i = 0 is the oldest stored transition.
  const Transition& at(std::size_t i) const;

  // Uniform sampling with replacement. Requires size() >= batch_size.
  std::vector<const Transition*> sample(std::size_t batch_size, std::mt19937_64& rng) const;

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // next slot to overwrite once full
  std::vector<Transition> items_;
};

}  // namespace credit::train
