#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "credit/dsl/ast.hpp"

namespace credit::dsl {

inline constexpr double kDivisionGuard = 1e-9;

enum class RuntimeErrorKind { DivisionNearZero, NonFiniteIntermediate, DomainError };
std::string to_string(RuntimeErrorKind kind);

class DslRuntimeError : public std::runtime_error {
 public:
  DslRuntimeError(RuntimeErrorKind kind, Span span, std::string state_digest, const std::string& detail,
                  const std::string* source);

  RuntimeErrorKind kind() const { return kind_; }
  Span span() const { return span_; }
  const std::string& state_digest() const { return state_digest_; }

 private:
  RuntimeErrorKind kind_;
  Span span_;
  std::string state_digest_;
};

struct WeightsBias {
  Eigen::VectorXd weights;
  double bias = 0.0;
};

struct WeightsBiasBatch {
  Eigen::MatrixXd weights;  // n_agents x batch
  Eigen::RowVectorXd bias;  // batch
};

// Requires a program validated against state.size(). Guards: every divisor
// must satisfy |d| >= 1e-9, log needs a positive argument, sqrt a
// non-negative one, and every intermediate must be finite. Violations throw
// DslRuntimeError carrying the node's span and the state's digest.
WeightsBias eval_weights_bias(const Program& program, const Eigen::VectorXd& state);

// Column-per-state batch form of eval_weights_bias; identical values.
WeightsBiasBatch eval_weights_bias_batch(const Program& program, const Eigen::MatrixXd& states);

}  // namespace credit::dsl
