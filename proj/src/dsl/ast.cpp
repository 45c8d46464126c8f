#include "credit/dsl/ast.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace credit::dsl {
namespace {

struct FuncInfo {
  Func func;
  std::string_view name;
  int arity;
};

constexpr std::array<FuncInfo, 12> kFuncs{{
    {Func::Abs, "abs", 1},
    {Func::Sqrt, "sqrt", 1},
    {Func::Exp, "exp", 1},
    {Func::Log, "log", 1},
    {Func::Relu, "relu", 1},
    {Func::Softmax, "softmax", 1},
    {Func::Sum, "sum", 1},
    {Func::Mean, "mean", 1},
    {Func::Minv, "minv", 1},
    {Func::Maxv, "maxv", 1},
    {Func::Clamp, "clamp", 3},
    {Func::Select, "select", 3},
}};

const FuncInfo& info(Func f) {
  return *std::find_if(kFuncs.begin(), kFuncs.end(), [f](const FuncInfo& i) { return i.func == f; });
}

ExprPtr make(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

std::pair<std::size_t, std::size_t> line_col(std::string_view source, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < source.size(); ++i) {
    if (source[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

bool is_binary(Kind k) {
  switch (k) {
    case Kind::Add:
    case Kind::Sub:
    case Kind::Mul:
    case Kind::Div:
      return true;
    default:
      return is_comparison(k);
  }
}

bool is_comparison(Kind k) {
  return k == Kind::Lt || k == Kind::Le || k == Kind::Gt || k == Kind::Ge || k == Kind::Eq;
}

std::string_view func_name(Func f) { return info(f).name; }
int func_arity(Func f) { return info(f).arity; }

std::optional<Func> func_from_name(std::string_view name) {
  for (const auto& i : kFuncs)
    if (i.name == name) return i.func;
  return std::nullopt;
}

ExprPtr make_literal(double v, Span span) { return make({.kind = Kind::Literal, .value = v, .args = {}, .span = span}); }
ExprPtr make_index(int i, Span span) { return make({.kind = Kind::Index, .lo = i, .args = {}, .span = span}); }
ExprPtr make_slice(int lo, int hi, Span span) {
  return make({.kind = Kind::Slice, .lo = lo, .hi = hi, .args = {}, .span = span});
}
ExprPtr make_vector(std::vector<ExprPtr> items, Span span) {
  return make({.kind = Kind::VectorLit, .args = std::move(items), .span = span});
}
ExprPtr make_unary(Kind k, ExprPtr operand, Span span) {
  return make({.kind = k, .args = {std::move(operand)}, .span = span});
}
ExprPtr make_binary(Kind k, ExprPtr lhs, ExprPtr rhs, Span span) {
  return make({.kind = k, .args = {std::move(lhs), std::move(rhs)}, .span = span});
}
ExprPtr make_call(Func f, std::vector<ExprPtr> args, Span span) {
  return make({.kind = Kind::Call, .func = f, .args = std::move(args), .span = span});
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  switch (a.kind) {
    case Kind::Literal:
      if (a.value != b.value) return false;
      break;
    case Kind::Index:
      if (a.lo != b.lo) return false;
      break;
    case Kind::Slice:
      if (a.lo != b.lo || a.hi != b.hi) return false;
      break;
    case Kind::Call:
      if (a.func != b.func) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!structurally_equal(*a.args[i], *b.args[i])) return false;
  return true;
}

bool structurally_equal(const Program& a, const Program& b) {
  return a.weights && b.weights && a.bias && b.bias && structurally_equal(*a.weights, *b.weights) &&
         structurally_equal(*a.bias, *b.bias);
}

std::string describe_span(std::string_view source, Span span) {
  const auto [l0, c0] = line_col(source, span.begin);
  const auto [l1, c1] = line_col(source, span.end);
  return std::to_string(l0) + ":" + std::to_string(c0) + "-" + std::to_string(l1) + ":" + std::to_string(c1);
}

}  // namespace credit::dsl
