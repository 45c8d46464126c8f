#include "credit/dsl/parser.hpp"

#include <cctype>
#include <charconv>
#include <memory>
#include <optional>

namespace credit::dsl {
namespace {

enum class Tok {
  Number,
  Ident,
  LBracket,
  RBracket,
  LParen,
  RParen,
  Comma,
  Colon,
  Plus,
  Minus,
  Star,
  Slash,
  Lt,
  Le,
  Gt,
  Ge,
  EqEq,
  Newline,
  End,
};

struct Token {
  Tok kind;
  std::string_view text;
  std::size_t pos;
};

std::string describe(Tok t) {
  switch (t) {
    case Tok::Number: return "number";
    case Tok::Ident: return "identifier";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Colon: return "':'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::EqEq: return "'=='";
    case Tok::Newline: return "newline";
    case Tok::End: return "end of input";
  }
  return "?";
}

std::pair<std::size_t, std::size_t> line_col(std::string_view src, std::size_t pos) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < pos && i < src.size(); ++i) {
    if (src[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) { lex(); }

  Program program() {
    Program p;
    skip_newlines();
    while (peek().kind != Tok::End) {
      const Token head = peek();
      if (head.kind != Tok::Ident || (head.text != "weights" && head.text != "bias"))
        fail({"'weights'", "'bias'"});
      ExprPtr& slot = head.text == "weights" ? p.weights : p.bias;
      if (slot) fail_at(head.pos, {"'" + std::string(head.text == "weights" ? "bias" : "weights") + "'"},
                        "duplicate '" + std::string(head.text) + "'");
      next();
      expect(Tok::Colon);
      slot = expression();
      if (peek().kind != Tok::End) expect(Tok::Newline);
      skip_newlines();
    }
    if (!p.weights) fail({"'weights'"});
    if (!p.bias) fail({"'bias'"});
    return p;
  }

  ExprPtr single() {
    skip_newlines();
    ExprPtr e = expression();
    skip_newlines();
    if (peek().kind != Tok::End) fail({"end of input"});
    return e;
  }

 private:
  void lex() {
    int depth = 0;
    std::size_t i = 0;
    auto push = [&](Tok k, std::size_t len) {
      tokens_.push_back({k, src_.substr(i, len), i});
      i += len;
    };
    while (i < src_.size()) {
      const char c = src_[i];
      if (c == '#') {
        while (i < src_.size() && src_[i] != '\n') ++i;
        continue;
      }
      if (c == '\n') {
        if (depth == 0 && (tokens_.empty() || tokens_.back().kind != Tok::Newline)) push(Tok::Newline, 1);
        else ++i;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) ||
          (c == '.' && i + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i + 1])))) {
        std::size_t j = i;
        while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
        if (j < src_.size() && src_[j] == '.') {
          ++j;
          while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
        }
        if (j < src_.size() && (src_[j] == 'e' || src_[j] == 'E')) {
          std::size_t k = j + 1;
          if (k < src_.size() && (src_[k] == '+' || src_[k] == '-')) ++k;
          if (k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k]))) {
            while (k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k]))) ++k;
            j = k;
          }
        }
        push(Tok::Number, j - i);
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t j = i;
        while (j < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_')) ++j;
        push(Tok::Ident, j - i);
        continue;
      }
      const char n = i + 1 < src_.size() ? src_[i + 1] : '\0';
      switch (c) {
        case '[': ++depth; push(Tok::LBracket, 1); break;
        case ']': --depth; push(Tok::RBracket, 1); break;
        case '(': ++depth; push(Tok::LParen, 1); break;
        case ')': --depth; push(Tok::RParen, 1); break;
        case ',': push(Tok::Comma, 1); break;
        case ':': push(Tok::Colon, 1); break;
        case '+': push(Tok::Plus, 1); break;
        case '-': push(Tok::Minus, 1); break;
        case '*': push(Tok::Star, 1); break;
        case '/': push(Tok::Slash, 1); break;
        case '<': n == '=' ? push(Tok::Le, 2) : push(Tok::Lt, 1); break;
        case '>': n == '=' ? push(Tok::Ge, 2) : push(Tok::Gt, 1); break;
        case '=':
          if (n == '=') {
            push(Tok::EqEq, 2);
            break;
          }
          [[fallthrough]];
        default:
          fail_at(i, {"expression"}, "unexpected character '" + std::string(1, c) + "'");
      }
      if (depth < 0) depth = 0;
    }
    tokens_.push_back({Tok::End, {}, src_.size()});
  }

  const Token& peek() const { return tokens_[at_]; }
  Token next() { return tokens_[at_++]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++at_;
    return true;
  }
  Token expect(Tok k) {
    if (peek().kind != k) fail({describe(k)});
    return next();
  }
  void skip_newlines() {
    while (peek().kind == Tok::Newline) ++at_;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) {
    const Token& t = peek();
    fail_at(t.pos, std::move(expected),
            t.kind == Tok::End ? "end of input" : describe(t.kind) + " '" + std::string(t.text) + "'");
  }
  [[noreturn]] void fail_at(std::size_t pos, std::vector<std::string> expected, std::string found) {
    const auto [line, col] = line_col(src_, pos);
    throw ParseError(pos, line, col, std::move(expected), std::move(found));
  }

  Span span_from(std::size_t begin) const {
    const std::size_t end = at_ > 0 ? tokens_[at_ - 1].pos + tokens_[at_ - 1].text.size() : begin;
    return {begin, end};
  }

  ExprPtr expression() {
    const std::size_t begin = peek().pos;
    ExprPtr lhs = additive();
    std::optional<Kind> cmp;
    switch (peek().kind) {
      case Tok::Lt: cmp = Kind::Lt; break;
      case Tok::Le: cmp = Kind::Le; break;
      case Tok::Gt: cmp = Kind::Gt; break;
      case Tok::Ge: cmp = Kind::Ge; break;
      case Tok::EqEq: cmp = Kind::Eq; break;
      default: break;
    }
    if (!cmp) return lhs;
    next();
    ExprPtr rhs = additive();
    return make_binary(*cmp, std::move(lhs), std::move(rhs), span_from(begin));
  }

  ExprPtr additive() {
    const std::size_t begin = peek().pos;
    ExprPtr lhs = term();
    for (;;) {
      Kind k;
      if (accept(Tok::Plus)) k = Kind::Add;
      else if (accept(Tok::Minus)) k = Kind::Sub;
      else return lhs;
      ExprPtr rhs = term();
      lhs = make_binary(k, std::move(lhs), std::move(rhs), span_from(begin));
    }
  }

  ExprPtr term() {
    const std::size_t begin = peek().pos;
    ExprPtr lhs = unary();
    for (;;) {
      Kind k;
      if (accept(Tok::Star)) k = Kind::Mul;
      else if (accept(Tok::Slash)) k = Kind::Div;
      else return lhs;
      ExprPtr rhs = unary();
      lhs = make_binary(k, std::move(lhs), std::move(rhs), span_from(begin));
    }
  }

  ExprPtr unary() {
    const std::size_t begin = peek().pos;
    if (accept(Tok::Minus)) {
      ExprPtr operand = unary();
      return make_unary(Kind::Neg, std::move(operand), span_from(begin));
    }
    return primary();
  }

  int index_literal() {
    const Token t = peek();
    if (t.kind != Tok::Number) fail({"integer index"});
    int value = 0;
    const auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size()) fail({"integer index"});
    next();
    return value;
  }

  ExprPtr primary() {
    const Token t = peek();
    const std::size_t begin = t.pos;
    switch (t.kind) {
      case Tok::Number: {
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
        if (ec != std::errc() || ptr != t.text.data() + t.text.size()) fail({"number"});
        next();
        return make_literal(value, span_from(begin));
      }
      case Tok::LParen: {
        next();
        ExprPtr inner = expression();
        expect(Tok::RParen);
        return inner;
      }
      case Tok::LBracket: {
        next();
        std::vector<ExprPtr> items;
        items.push_back(expression());
        while (accept(Tok::Comma)) items.push_back(expression());
        expect(Tok::RBracket);
        return make_vector(std::move(items), span_from(begin));
      }
      case Tok::Ident: {
        next();
        if (t.text == "s") {
          expect(Tok::LBracket);
          const int lo = index_literal();
          if (accept(Tok::Colon)) {
            const int hi = index_literal();
            expect(Tok::RBracket);
            return make_slice(lo, hi, span_from(begin));
          }
          expect(Tok::RBracket);
          return make_index(lo, span_from(begin));
        }
        const auto func = func_from_name(t.text);
        if (!func) {
          --at_;
          fail({"'s'", "function name", "number", "'('", "'['"});
        }
        expect(Tok::LParen);
        std::vector<ExprPtr> args;
        args.push_back(expression());
        while (accept(Tok::Comma)) args.push_back(expression());
        const int arity = func_arity(*func);
        if (static_cast<int>(args.size()) != arity) {
          if (static_cast<int>(args.size()) < arity) fail({"','"});
          fail({"')'"});
        }
        expect(Tok::RParen);
        return make_call(*func, std::move(args), span_from(begin));
      }
      default:
        fail({"number", "'s'", "function name", "'('", "'['", "'-'"});
    }
  }

  std::string_view src_;
  std::vector<Token> tokens_;
  std::size_t at_ = 0;
};

std::string format_message(std::size_t line, std::size_t column, const std::vector<std::string>& expected,
                           const std::string& found) {
  std::string msg = "ParseError at " + std::to_string(line) + ":" + std::to_string(column) + ": expected ";
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i) msg += i + 1 == expected.size() ? " or " : ", ";
    msg += expected[i];
  }
  msg += ", found " + found;
  return msg;
}

}  // namespace

ParseError::ParseError(std::size_t position, std::size_t line, std::size_t column,
                       std::vector<std::string> expected, std::string found)
    : std::runtime_error(format_message(line, column, expected, found)),
      position_(position),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

Program parse(std::string_view source) {
  Parser parser(source);
  Program p = parser.program();
  p.source = std::make_shared<const std::string>(source);
  return p;
}

ExprPtr parse_expression(std::string_view source) { return Parser(source).single(); }

}  // namespace credit::dsl
