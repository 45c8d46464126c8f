#include "credit/dsl/validate.hpp"

namespace credit::dsl {
namespace {

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Add: return "+";
    case Kind::Sub: return "-";
    case Kind::Mul: return "*";
    case Kind::Div: return "/";
    case Kind::Lt: return "<";
    case Kind::Le: return "<=";
    case Kind::Gt: return ">";
    case Kind::Ge: return ">=";
    case Kind::Eq: return "==";
    default: return "?";
  }
}

class Checker {
 public:
  Checker(int state_dim, std::vector<Diagnostic>& errors) : state_dim_(state_dim), errors_(errors) {}

  std::optional<Shape> infer(const Expr& e) {
    switch (e.kind) {
      case Kind::Literal:
        return Shape::Scalar();
      case Kind::Index:
        if (e.lo < 0 || e.lo >= state_dim_) {
          error("IndexOutOfRange", "state index " + std::to_string(e.lo) + " out of range [0, " +
                                       std::to_string(state_dim_) + ")", e.span);
          return std::nullopt;
        }
        return Shape::Scalar();
      case Kind::Slice:
        if (e.lo >= e.hi) {
          error("EmptySlice", "slice s[" + std::to_string(e.lo) + ":" + std::to_string(e.hi) + "] is empty", e.span);
          return std::nullopt;
        }
        if (e.lo < 0 || e.hi > state_dim_) {
          error("IndexOutOfRange", "slice s[" + std::to_string(e.lo) + ":" + std::to_string(e.hi) +
                                       "] out of range [0, " + std::to_string(state_dim_) + ")", e.span);
          return std::nullopt;
        }
        return Shape::Vector(e.hi - e.lo);
      case Kind::VectorLit: {
        int total = 0;
        bool ok = true;
        for (const auto& item : e.args) {
          const auto s = infer(*item);
          if (!s) ok = false;
          else total += s->length;
        }
        if (!ok) return std::nullopt;
        return Shape::Vector(total);
      }
      case Kind::Neg:
        return infer(*e.args[0]);
      case Kind::Call:
        return call(e);
      default:
        return broadcast(e, {e.args[0].get(), e.args[1].get()}, kind_name(e.kind));
    }
  }

 private:
  void error(std::string kind, std::string message, Span span) {
    errors_.push_back({std::move(kind), std::move(message), span});
  }

  std::optional<Shape> broadcast(const Expr& e, std::vector<const Expr*> operands, const std::string& what) {
    std::vector<Shape> shapes;
    for (const Expr* o : operands) {
      const auto s = infer(*o);
      if (!s) return std::nullopt;
      shapes.push_back(*s);
    }
    std::optional<Shape> result;
    for (const Shape& s : shapes) {
      if (s.scalar) continue;
      if (result && result->length != s.length) {
        error("ShapeMismatch", "operands of '" + what + "' have vector lengths " + std::to_string(result->length) +
                                   " and " + std::to_string(s.length), e.span);
        return std::nullopt;
      }
      result = s;
    }
    return result ? *result : Shape::Scalar();
  }

  std::optional<Shape> call(const Expr& e) {
    const std::string name(func_name(e.func));
    switch (e.func) {
      case Func::Abs:
      case Func::Sqrt:
      case Func::Exp:
      case Func::Log:
      case Func::Relu:
        return infer(*e.args[0]);
      case Func::Softmax:
      case Func::Sum:
      case Func::Mean:
      case Func::Minv:
      case Func::Maxv: {
        const auto s = infer(*e.args[0]);
        if (!s) return std::nullopt;
        if (s->scalar) {
          error("ShapeMismatch", name + " expects a vector argument, got scalar", e.span);
          return std::nullopt;
        }
        return e.func == Func::Softmax ? *s : Shape::Scalar();
      }
      case Func::Clamp:
      case Func::Select:
        return broadcast(e, {e.args[0].get(), e.args[1].get(), e.args[2].get()}, name);
    }
    return std::nullopt;
  }

  int state_dim_;
  std::vector<Diagnostic>& errors_;
};

// Conservative sign analysis: true only when every value the expression can
// take is >= 0 (or it fails at runtime).
bool provably_nonnegative(const Expr& e) {
  auto all_args = [&e](std::size_t from = 0) {
    for (std::size_t i = from; i < e.args.size(); ++i)
      if (!provably_nonnegative(*e.args[i])) return false;
    return true;
  };
  switch (e.kind) {
    case Kind::Literal:
      return e.value >= 0.0;
    case Kind::Index:
    case Kind::Slice:
    case Kind::Neg:
    case Kind::Sub:
      return false;
    case Kind::VectorLit:
    case Kind::Add:
    case Kind::Mul:
    case Kind::Div:
      return all_args();
    case Kind::Lt:
    case Kind::Le:
    case Kind::Gt:
    case Kind::Ge:
    case Kind::Eq:
      return true;
    case Kind::Call:
      switch (e.func) {
        case Func::Softmax:
        case Func::Relu:
        case Func::Abs:
        case Func::Exp:
        case Func::Sqrt:
          return true;
        case Func::Log:
          return false;
        case Func::Sum:
        case Func::Mean:
        case Func::Minv:
        case Func::Maxv:
          return all_args();
        case Func::Clamp:
          return provably_nonnegative(*e.args[1]);
        case Func::Select:
          return all_args(1);
      }
  }
  return false;
}

}  // namespace

std::string to_string(const Shape& s) {
  return s.scalar ? "Scalar" : "Vector(" + std::to_string(s.length) + ")";
}

std::string ValidationReport::describe(const std::string& source) const {
  std::string out;
  for (const auto& d : errors) {
    out += d.kind + " at " + describe_span(source, d.span) + ": " + d.message;
    if (d.span.end > d.span.begin && d.span.end <= source.size())
      out += " (`" + source.substr(d.span.begin, d.span.end - d.span.begin) + "`)";
    out += '\n';
  }
  return out;
}

std::optional<Shape> infer_shape(const Expr& expr, int state_dim, std::vector<Diagnostic>& errors) {
  return Checker(state_dim, errors).infer(expr);
}

ValidationReport validate(Program& program, int n_agents, int state_dim) {
  ValidationReport report;
  program.binding.reset();
  if (!program.weights || !program.bias) {
    report.errors.push_back({"Incomplete", "program must define both weights and bias", {}});
    return report;
  }
  Checker checker(state_dim, report.errors);
  report.weights_type = checker.infer(*program.weights);
  report.bias_type = checker.infer(*program.bias);

  if (report.weights_type) {
    const Shape& w = *report.weights_type;
    if (w.scalar)
      report.errors.push_back({"ShapeMismatch", "weights must be a vector of length " + std::to_string(n_agents) +
                                                    ", got Scalar", program.weights->span});
    else if (w.length != n_agents)
      report.errors.push_back({"ShapeMismatch", "weights: vector length " + std::to_string(w.length) + " ≠ " +
                                                    std::to_string(n_agents), program.weights->span});
  }
  if (report.bias_type && !report.bias_type->scalar)
    report.errors.push_back({"ShapeMismatch", "bias must be Scalar, got " + to_string(*report.bias_type),
                             program.bias->span});

  if (!provably_nonnegative(*program.weights))
    report.warnings.push_back("weights may be negative: no sign guarantee for the weights expression");

  report.ok = report.errors.empty();
  if (report.ok) program.binding = Binding{n_agents, state_dim};
  return report;
}

}  // namespace credit::dsl
