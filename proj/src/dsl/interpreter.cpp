#include "credit/dsl/interpreter.hpp"

#include "credit/common/digest.hpp"
#include "credit/dsl/validate.hpp"

namespace credit::dsl {
namespace {

using Array = Eigen::ArrayXXd;

// rows = 1 for scalars, k for Vector(k); one column per state.
struct Value {
  bool scalar = true;
  Array a;
};

class Evaluator {
 public:
  Evaluator(const Program& program, const Eigen::MatrixXd& states) : program_(program), states_(states) {}

  Value eval(const Expr& e) {
    Value v = dispatch(e);
    if (!v.a.allFinite()) fail(RuntimeErrorKind::NonFiniteIntermediate, e, first_bad_col(!v.a.isFinite()),
                               "intermediate value is NaN or infinite");
    return v;
  }

 private:
  Eigen::Index cols() const { return states_.cols(); }

  template <typename Mask>
  Eigen::Index first_bad_col(const Mask& mask) const {
    const auto any = mask.colwise().any();
    for (Eigen::Index c = 0; c < any.size(); ++c)
      if (any(c)) return c;
    return 0;
  }

  [[noreturn]] void fail(RuntimeErrorKind kind, const Expr& e, Eigen::Index col, const std::string& detail) const {
    const Eigen::VectorXd state = states_.col(col);
    throw DslRuntimeError(kind, e.span, state_digest(state), detail, program_.source.get());
  }

  static Array expand(const Value& v, Eigen::Index rows) {
    return v.scalar && rows > 1 ? Array(v.a.replicate(rows, 1)) : v.a;
  }

  // Broadcasts operands to a common row count.
  static std::pair<Eigen::Index, bool> common(std::initializer_list<const Value*> values) {
    Eigen::Index rows = 1;
    bool scalar = true;
    for (const Value* v : values)
      if (!v->scalar) {
        rows = v->a.rows();
        scalar = false;
      }
    return {rows, scalar};
  }

  Value dispatch(const Expr& e) {
    switch (e.kind) {
      case Kind::Literal:
        return {true, Array::Constant(1, cols(), e.value)};
      case Kind::Index:
        return {true, states_.row(e.lo).array()};
      case Kind::Slice:
        return {false, states_.middleRows(e.lo, e.hi - e.lo).array()};
      case Kind::VectorLit: {
        std::vector<Value> parts;
        Eigen::Index rows = 0;
        for (const auto& item : e.args) {
          parts.push_back(eval(*item));
          rows += parts.back().a.rows();
        }
        Array out(rows, cols());
        Eigen::Index at = 0;
        for (const auto& p : parts) {
          out.middleRows(at, p.a.rows()) = p.a;
          at += p.a.rows();
        }
        return {false, std::move(out)};
      }
      case Kind::Neg: {
        Value v = eval(*e.args[0]);
        v.a = -v.a;
        return v;
      }
      case Kind::Call:
        return call(e);
      default:
        return binary(e);
    }
  }

  Value binary(const Expr& e) {
    const Value l = eval(*e.args[0]);
    const Value r = eval(*e.args[1]);
    const auto [rows, scalar] = common({&l, &r});
    const Array x = expand(l, rows);
    const Array y = expand(r, rows);
    switch (e.kind) {
      case Kind::Add: return {scalar, x + y};
      case Kind::Sub: return {scalar, x - y};
      case Kind::Mul: return {scalar, x * y};
      case Kind::Div: {
        const auto near_zero = y.abs() < kDivisionGuard;
        if (near_zero.any())
          fail(RuntimeErrorKind::DivisionNearZero, e, first_bad_col(near_zero),
               "divisor magnitude below 1e-09");
        return {scalar, x / y};
      }
      case Kind::Lt: return {scalar, (x < y).cast<double>()};
      case Kind::Le: return {scalar, (x <= y).cast<double>()};
      case Kind::Gt: return {scalar, (x > y).cast<double>()};
      case Kind::Ge: return {scalar, (x >= y).cast<double>()};
      case Kind::Eq: return {scalar, (x == y).cast<double>()};
      default: throw std::logic_error("unhandled binary operator");
    }
  }

  Value call(const Expr& e) {
    switch (e.func) {
      case Func::Abs: {
        Value v = eval(*e.args[0]);
        v.a = v.a.abs();
        return v;
      }
      case Func::Sqrt: {
        Value v = eval(*e.args[0]);
        const auto bad = v.a < 0.0;
        if (bad.any()) fail(RuntimeErrorKind::DomainError, e, first_bad_col(bad), "sqrt of a negative value");
        v.a = v.a.sqrt();
        return v;
      }
      case Func::Exp: {
        Value v = eval(*e.args[0]);
        v.a = v.a.exp();
        return v;
      }
      case Func::Log: {
        Value v = eval(*e.args[0]);
        const auto bad = v.a <= 0.0;
        if (bad.any()) fail(RuntimeErrorKind::DomainError, e, first_bad_col(bad), "log of a non-positive value");
        v.a = v.a.log();
        return v;
      }
      case Func::Relu: {
        Value v = eval(*e.args[0]);
        v.a = v.a.max(0.0);
        return v;
      }
      case Func::Softmax: {
        Value v = eval(*e.args[0]);
        Array shifted = v.a.rowwise() - v.a.colwise().maxCoeff();
        Array ex = shifted.exp();
        v.a = ex.rowwise() / ex.colwise().sum();
        return v;
      }
      case Func::Sum: return {true, eval(*e.args[0]).a.colwise().sum()};
      case Func::Mean: return {true, eval(*e.args[0]).a.colwise().mean()};
      case Func::Minv: return {true, eval(*e.args[0]).a.colwise().minCoeff()};
      case Func::Maxv: return {true, eval(*e.args[0]).a.colwise().maxCoeff()};
      case Func::Clamp: {
        const Value x = eval(*e.args[0]);
        const Value lo = eval(*e.args[1]);
        const Value hi = eval(*e.args[2]);
        const auto [rows, scalar] = common({&x, &lo, &hi});
        return {scalar, expand(x, rows).max(expand(lo, rows)).min(expand(hi, rows))};
      }
      case Func::Select: {
        const Value c = eval(*e.args[0]);
        const Value a = eval(*e.args[1]);
        const Value b = eval(*e.args[2]);
        const auto [rows, scalar] = common({&c, &a, &b});
        return {scalar, (expand(c, rows) != 0.0).select(expand(a, rows), expand(b, rows))};
      }
    }
    throw std::logic_error("unhandled function");
  }

  const Program& program_;
  const Eigen::MatrixXd& states_;
};

void require_bound(const Program& program, Eigen::Index state_dim) {
  if (!program.binding) throw std::invalid_argument("TFCAF program has not been validated");
  if (program.binding->state_dim != state_dim)
    throw std::invalid_argument("TFCAF program validated for state_dim " +
                                std::to_string(program.binding->state_dim) + ", got state of length " +
                                std::to_string(state_dim));
}

}  // namespace

std::string to_string(RuntimeErrorKind kind) {
  switch (kind) {
    case RuntimeErrorKind::DivisionNearZero: return "DivisionNearZero";
    case RuntimeErrorKind::NonFiniteIntermediate: return "NonFiniteIntermediate";
    case RuntimeErrorKind::DomainError: return "DomainError";
  }
  return "RuntimeError";
}

namespace {
std::string runtime_message(RuntimeErrorKind kind, Span span, const std::string& digest, const std::string& detail,
                            const std::string* source) {
  std::string msg = to_string(kind);
  if (source) {
    msg += " at " + describe_span(*source, span);
    if (span.end > span.begin && span.end <= source->size())
      msg += " (`" + source->substr(span.begin, span.end - span.begin) + "`)";
  } else {
    msg += " at bytes " + std::to_string(span.begin) + "-" + std::to_string(span.end);
  }
  msg += ": " + detail + " [state " + digest + "]";
  return msg;
}
}  // namespace

DslRuntimeError::DslRuntimeError(RuntimeErrorKind kind, Span span, std::string state_digest,
                                 const std::string& detail, const std::string* source)
    : std::runtime_error(runtime_message(kind, span, state_digest, detail, source)),
      kind_(kind),
      span_(span),
      state_digest_(std::move(state_digest)) {}

WeightsBiasBatch eval_weights_bias_batch(const Program& program, const Eigen::MatrixXd& states) {
  require_bound(program, states.rows());
  Evaluator ev(program, states);
  const auto w = ev.eval(*program.weights);
  const auto b = ev.eval(*program.bias);
  return {w.a.matrix(), b.a.row(0).matrix()};
}

WeightsBias eval_weights_bias(const Program& program, const Eigen::VectorXd& state) {
  const auto batch = eval_weights_bias_batch(program, state);
  return {batch.weights.col(0), batch.bias(0)};
}

}  // namespace credit::dsl
