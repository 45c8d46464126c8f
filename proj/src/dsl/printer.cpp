#include "credit/dsl/printer.hpp"

#include <charconv>
#include <stdexcept>

namespace credit::dsl {
namespace {

// Binding strength: higher binds tighter.
int precedence(const Expr& e) {
  switch (e.kind) {
    case Kind::Lt:
    case Kind::Le:
    case Kind::Gt:
    case Kind::Ge:
    case Kind::Eq:
      return 1;
    case Kind::Add:
    case Kind::Sub:
      return 2;
    case Kind::Mul:
    case Kind::Div:
      return 3;
    case Kind::Neg:
      return 4;
    default:
      return 5;
  }
}

const char* symbol(Kind k) {
  switch (k) {
    case Kind::Add: return " + ";
    case Kind::Sub: return " - ";
    case Kind::Mul: return " * ";
    case Kind::Div: return " / ";
    case Kind::Lt: return " < ";
    case Kind::Le: return " <= ";
    case Kind::Gt: return " > ";
    case Kind::Ge: return " >= ";
    case Kind::Eq: return " == ";
    default: throw std::logic_error("not a binary operator");
  }
}

void emit(const Expr& e, int min_prec, std::string& out);

void emit_list(const std::vector<ExprPtr>& items, std::string& out) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    emit(*items[i], 0, out);
  }
}

void emit(const Expr& e, int min_prec, std::string& out) {
  const int prec = precedence(e);
  const bool paren = prec < min_prec;
  if (paren) out += '(';
  switch (e.kind) {
    case Kind::Literal:
      out += format_number(e.value);
      break;
    case Kind::Index:
      out += "s[" + std::to_string(e.lo) + "]";
      break;
    case Kind::Slice:
      out += "s[" + std::to_string(e.lo) + ":" + std::to_string(e.hi) + "]";
      break;
    case Kind::VectorLit:
      out += '[';
      emit_list(e.args, out);
      out += ']';
      break;
    case Kind::Neg:
      out += '-';
      emit(*e.args[0], 4, out);
      break;
    case Kind::Call:
      out += func_name(e.func);
      out += '(';
      emit_list(e.args, out);
      out += ')';
      break;
    default:
      // Left-associative arithmetic; comparisons do not chain.
      emit(*e.args[0], is_comparison(e.kind) ? prec + 1 : prec, out);
      out += symbol(e.kind);
      emit(*e.args[1], prec + 1, out);
      break;
  }
  if (paren) out += ')';
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("format_number: conversion failed");
  std::string s(buf, ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string pretty_print(const Expr& expr) {
  std::string out;
  emit(expr, 0, out);
  return out;
}

std::string pretty_print(const Program& program) {
  return "weights: " + pretty_print(*program.weights) + "\nbias: " + pretty_print(*program.bias) + "\n";
}

}  // namespace credit::dsl
