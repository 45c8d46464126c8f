#include "credit/autodiff/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace credit::ad {
namespace {

// Rectifier on/off pattern of every hidden unit.
std::vector<bool> activation_pattern(const MlpParams<double>& p, const Vec<double>& x) {
  MlpTape<double> tape;
  mlp_forward_batch<double>(p, x, &tape);
  std::vector<bool> pattern;
  for (std::size_t k = 0; k + 1 < tape.pre.size(); ++k)
    for (Eigen::Index i = 0; i < tape.pre[k].rows(); ++i) pattern.push_back(tape.pre[k](i, 0) > 0.0);
  return pattern;
}

}  // namespace

GradCheckReport finite_diff_check(const MlpParams<double>& params, const Vec<double>& input,
                                  const GradCheckOptions& options) {
  if (!(options.epsilon > 1e-8 && options.epsilon < 1e-3))
    throw std::invalid_argument("finite_diff_check: epsilon must lie in (1e-8, 1e-3)");
  params.check_chain();

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  Vec<double> projection(params.output_dim());
  for (auto& c : projection) c = normal(rng);

  auto analytic = mlp_backward<double>(params, input, projection);
  std::vector<double> grads = flatten(analytic.params);
  grads.insert(grads.end(), analytic.input.data(), analytic.input.data() + analytic.input.size());

  if (options.inject_fault && !grads.empty()) {
    auto it = std::max_element(grads.begin(), grads.end(),
                               [](double a, double b) { return std::abs(a) < std::abs(b); });
    *it *= 2.0;
  }

  const double eps = options.epsilon;
  MlpParams<double> probe = params;
  Vec<double> x = input;
  std::vector<double> flat = flatten(params);
  const std::size_t n_params = flat.size();

  auto objective = [&] { return projection.dot(mlp_forward<double>(probe, x)); };
  auto pattern = [&] { return activation_pattern(probe, x); };

  GradCheckReport report;
  auto compare = [&](std::size_t index, const std::function<void(double)>& set) {
    set(+eps);
    const double up = objective();
    const auto pattern_up = pattern();
    set(-eps);
    const double down = objective();
    const auto pattern_down = pattern();
    set(0.0);
    if (pattern_up != pattern_down) {
      ++report.skipped_kinks;
      return;
    }
    const double numeric = (up - down) / (2.0 * eps);
    const double a = grads[index];
    const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
    report.max_rel_error = std::max(report.max_rel_error, std::abs(a - numeric) / denom);
    ++report.compared;
  };

  for (std::size_t i = 0; i < n_params; ++i) {
    const double base = flat[i];
    compare(i, [&](double delta) {
      flat[i] = base + delta;
      unflatten<double>(probe, flat);
    });
    flat[i] = base;
  }
  unflatten<double>(probe, flat);
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double base = input[j];
    compare(n_params + static_cast<std::size_t>(j), [&](double delta) { x[j] = base + delta; });
  }
  return report;
}

}  // namespace credit::ad
