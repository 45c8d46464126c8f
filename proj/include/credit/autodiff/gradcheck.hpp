#pragma once

#include <cstdint>

#include "credit/autodiff/mlp.hpp"

namespace credit::ad {

struct GradCheckOptions {
  double epsilon = 1e-5;
  std::uint64_t seed = 0;
  // Doubles the largest analytic gradient entry before comparing.
  bool inject_fault = false;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  int compared = 0;
  // Components whose +-epsilon perturbation flips a rectifier; the function
  // is not differentiable there so they are left out of the comparison.
  int skipped_kinks = 0;
};

// Compares reverse-mode gradients of c . mlp(x) (c a random projection drawn
// from `seed`) against central differences, for every parameter and input
// component. Relative error uses max(|analytic|, |numeric|, 1e-8).
GradCheckReport finite_diff_check(const MlpParams<double>& params, const Vec<double>& input,
                                  const GradCheckOptions& options = {});

}  // namespace credit::ad
