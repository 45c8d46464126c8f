#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "credit/dsl/ast.hpp"

namespace credit::dsl {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t position, std::size_t line, std::size_t column, std::vector<std::string> expected,
             std::string found);

  std::size_t position() const { return position_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t position_;
  std::size_t line_;
  std::size_t column_;
  std::vector<std::string> expected_;
};

// Parses
//   weights: <expr>
//   bias: <expr>
// in either order, each exactly once. '#' starts a comment running to end of
// line; newlines inside brackets or parentheses are ignored.
//
// Precedence, loosest first: comparisons (< <= > >= ==, non-associative),
// + and -, * and /, unary minus.
Program parse(std::string_view source);

// Parses a single expression (no `weights:`/`bias:` framing).
ExprPtr parse_expression(std::string_view source);

}  // namespace credit::dsl
