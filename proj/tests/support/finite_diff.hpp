#pragma once

// Central-difference reference gradients, independent of the library's
// reverse-mode code.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Core>

namespace credit::testing {

inline double rel_error(double analytic, double numeric, double floor = 1e-6) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

// (f(x + eps e_i) - f(x - eps e_i)) / 2 eps, restoring x[i] afterwards.
inline double central_difference(std::vector<double>& x, std::size_t i, double eps,
                                 const std::function<double(const std::vector<double>&)>& f) {
  const double keep = x[i];
  x[i] = keep + eps;
  const double up = f(x);
  x[i] = keep - eps;
  const double down = f(x);
  x[i] = keep;
  return (up - down) / (2.0 * eps);
}

inline double central_difference(Eigen::VectorXd x, Eigen::Index i, double eps,
                                 const std::function<double(const Eigen::VectorXd&)>& f) {
  const double keep = x(i);
  x(i) = keep + eps;
  const double up = f(x);
  x(i) = keep - eps;
  const double down = f(x);
  return (up - down) / (2.0 * eps);
}

}  // namespace credit::testing
