#pragma once

#include <optional>
#include <string>
#include <vector>

#include "credit/dsl/ast.hpp"

namespace credit::dsl {

// Static type of an expression: a scalar or a vector of known length.
struct Shape {
  bool scalar = true;
  int length = 1;

  static Shape Scalar() { return {true, 1}; }
  static Shape Vector(int n) { return {false, n}; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(const Shape& s);

struct Diagnostic {
  std::string kind;  // ShapeMismatch, IndexOutOfRange, EmptySlice, ArityMismatch, ParseError, ...
  std::string message;
  Span span;
};

struct ValidationReport {
  bool ok = false;
  std::optional<Shape> weights_type;
  std::optional<Shape> bias_type;
  std::vector<std::string> warnings;
  std::vector<Diagnostic> errors;

  // One line per error with source positions, suitable for feedback text.
  std::string describe(const std::string& source) const;
};

// Infers shapes over both expressions. Never throws for malformed programs;
// every problem lands in the report. On success the program's binding is set.
ValidationReport validate(Program& program, int n_agents, int state_dim);

// Shape of a standalone expression, or nullopt with diagnostics appended.
std::optional<Shape> infer_shape(const Expr& expr, int state_dim, std::vector<Diagnostic>& errors);

}  // namespace credit::dsl
