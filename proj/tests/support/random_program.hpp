#pragma once

// Random well-shaped mixer programs for round-trip and probe tests.

#include <random>

#include "credit/dsl/ast.hpp"

namespace credit::testing {

class ProgramGenerator {
 public:
  ProgramGenerator(int n_agents, int state_dim, std::uint64_t seed) : n_(n_agents), d_(state_dim), rng_(seed) {}

  dsl::Program program(int depth = 4) {
    dsl::Program p;
    p.weights = vector(n_, depth);
    p.bias = scalar(depth);
    return p;
  }

  // Weights guaranteed non-negative: softmax, relu, abs or exp at the root.
  dsl::Program nonnegative_program(int depth = 3) {
    static constexpr dsl::Func roots[] = {dsl::Func::Softmax, dsl::Func::Relu, dsl::Func::Abs, dsl::Func::Exp};
    dsl::Program p;
    p.weights = dsl::make_call(roots[pick(4)], {vector(n_, depth)});
    p.bias = scalar(depth);
    return p;
  }

  dsl::ExprPtr scalar(int depth) {
    using dsl::Func;
    using dsl::Kind;
    if (depth <= 0 || pick(5) == 0) return pick(2) ? literal() : dsl::make_index(pick(d_));
    switch (pick(8)) {
      case 0:
        return dsl::make_unary(Kind::Neg, scalar(depth - 1));
      case 1:
      case 2:
        return dsl::make_binary(binop(), scalar(depth - 1), scalar(depth - 1));
      case 3:
        return dsl::make_binary(cmpop(), scalar(depth - 1), scalar(depth - 1));
      case 4: {
        static constexpr Func unary[] = {Func::Abs, Func::Sqrt, Func::Exp, Func::Log, Func::Relu};
        return dsl::make_call(unary[pick(5)], {scalar(depth - 1)});
      }
      case 5: {
        static constexpr Func reduce[] = {Func::Sum, Func::Mean, Func::Minv, Func::Maxv};
        return dsl::make_call(reduce[pick(4)], {vector(1 + pick(4), depth - 1)});
      }
      case 6:
        return dsl::make_call(Func::Clamp, {scalar(depth - 1), scalar(depth - 1), scalar(depth - 1)});
      default:
        return dsl::make_call(Func::Select, {scalar(depth - 1), scalar(depth - 1), scalar(depth - 1)});
    }
  }

  dsl::ExprPtr vector(int len, int depth) {
    using dsl::Func;
    using dsl::Kind;
    if (depth <= 0 || pick(5) == 0) {
      if (len <= d_ && pick(2)) {
        const int lo = pick(d_ - len + 1);
        return dsl::make_slice(lo, lo + len);
      }
      std::vector<dsl::ExprPtr> items;
      for (int i = 0; i < len; ++i) items.push_back(pick(2) ? literal() : dsl::make_index(pick(d_)));
      return dsl::make_vector(std::move(items));
    }
    switch (pick(7)) {
      case 0:
        return dsl::make_unary(Kind::Neg, vector(len, depth - 1));
      case 1:
        return dsl::make_binary(binop(), vector(len, depth - 1), vector(len, depth - 1));
      case 2:
        return pick(2) ? dsl::make_binary(binop(), scalar(depth - 1), vector(len, depth - 1))
                       : dsl::make_binary(binop(), vector(len, depth - 1), scalar(depth - 1));
      case 3: {
        static constexpr Func unary[] = {Func::Abs, Func::Sqrt, Func::Exp, Func::Log, Func::Relu, Func::Softmax};
        return dsl::make_call(unary[pick(6)], {vector(len, depth - 1)});
      }
      case 4: {
        // Concatenation of a scalar and a shorter vector.
        if (len == 1) return dsl::make_vector({scalar(depth - 1)});
        return dsl::make_vector({scalar(depth - 1), vector(len - 1, depth - 1)});
      }
      case 5:
        return dsl::make_call(Func::Clamp, {vector(len, depth - 1), scalar(depth - 1), scalar(depth - 1)});
      default:
        return dsl::make_call(Func::Select, {vector(len, depth - 1), vector(len, depth - 1), scalar(depth - 1)});
    }
  }

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

 private:
  dsl::ExprPtr literal() {
    switch (pick(4)) {
      case 0:
        return dsl::make_literal(static_cast<double>(pick(10)));
      case 1:
        return dsl::make_literal(std::uniform_real_distribution<double>(0.0, 10.0)(rng_));
      case 2:
        return dsl::make_literal(std::uniform_real_distribution<double>(0.0, 1e-3)(rng_));
      default:
        return dsl::make_literal(0.5 * pick(5));
    }
  }
  dsl::Kind binop() {
    static constexpr dsl::Kind ops[] = {dsl::Kind::Add, dsl::Kind::Sub, dsl::Kind::Mul, dsl::Kind::Div};
    return ops[pick(4)];
  }
  dsl::Kind cmpop() {
    static constexpr dsl::Kind ops[] = {dsl::Kind::Lt, dsl::Kind::Le, dsl::Kind::Gt, dsl::Kind::Ge, dsl::Kind::Eq};
    return ops[pick(5)];
  }

  int n_;
  int d_;
  std::mt19937_64 rng_;
};

}  // namespace credit::testing
