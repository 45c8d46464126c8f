#pragma once

#include <string>

#include "credit/dsl/ast.hpp"

namespace credit::dsl {

// Canonical text: "weights: <expr>\nbias: <expr>\n", single spaces around
// binary operators, ", " between arguments, and parentheses only where
// precedence or associativity requires them. Literals use the shortest
// round-tripping decimal form with a forced fraction ("1.0", "0.25", "1e-09").
std::string pretty_print(const Program& program);
std::string pretty_print(const Expr& expr);

std::string format_number(double v);

}  // namespace credit::dsl
