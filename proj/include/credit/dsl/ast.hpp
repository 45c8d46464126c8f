#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace credit::dsl {

// Half-open byte range into the program's source text.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
};

enum class Kind {
  Literal,
  Index,      // s[i]
  Slice,      // s[i:j]
  VectorLit,  // [e, ...]
  Neg,
  Add,
  Sub,
  Mul,
  Div,
  Lt,
  Le,
  Gt,
  Ge,
  Eq,
  Call,
};

enum class Func { Abs, Sqrt, Exp, Log, Relu, Softmax, Sum, Mean, Minv, Maxv, Clamp, Select };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  Kind kind = Kind::Literal;
  double value = 0.0;  // Literal
  int lo = 0;          // Index / Slice start
  int hi = 0;          // Slice end (exclusive)
  Func func = Func::Abs;
  std::vector<ExprPtr> args;
  Span span;
};

bool is_binary(Kind k);
bool is_comparison(Kind k);
std::string_view func_name(Func f);
std::optional<Func> func_from_name(std::string_view name);
int func_arity(Func f);

ExprPtr make_literal(double v, Span span = {});
ExprPtr make_index(int i, Span span = {});
ExprPtr make_slice(int lo, int hi, Span span = {});
ExprPtr make_vector(std::vector<ExprPtr> items, Span span = {});
ExprPtr make_unary(Kind k, ExprPtr operand, Span span = {});
ExprPtr make_binary(Kind k, ExprPtr lhs, ExprPtr rhs, Span span = {});
ExprPtr make_call(Func f, std::vector<ExprPtr> args, Span span = {});

// Equality ignoring spans.
bool structurally_equal(const Expr& a, const Expr& b);

struct Binding {
  int n_agents = 0;
  int state_dim = 0;
};

// A TFCAF program: agent weights and a scalar bias, both functions of the
// global state. `binding` is set once validation succeeds.
struct Program {
  ExprPtr weights;
  ExprPtr bias;
  std::shared_ptr<const std::string> source;
  std::optional<Binding> binding;
};

bool structurally_equal(const Program& a, const Program& b);

// "line:col-line:col" (1-based) for a span of `source`.
std::string describe_span(std::string_view source, Span span);

}  // namespace credit::dsl
