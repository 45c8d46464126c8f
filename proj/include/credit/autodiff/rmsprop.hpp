#pragma once

#include "credit/autodiff/mlp.hpp"

namespace credit::ad {

// Running mean of squared gradients, same shape as the parameters.
template <typename Scalar = double>
struct RmsPropState {
  MlpParams<Scalar> mean_sq;
  static constexpr double kDecay = 0.99;
  static constexpr double kEps = 1e-5;

  static RmsPropState for_params(const MlpParams<Scalar>& p) { return {p.zeros_like()}; }
};

// v <- 0.99 v + 0.01 g^2 ;  p <- p - lr * g / sqrt(v + 1e-5).
// Throws NonFiniteGradient before touching params or state.
template <typename Scalar>
void sgd_adaptive_step(MlpParams<Scalar>& params, const MlpParams<Scalar>& grads,
                       RmsPropState<Scalar>& state, Scalar lr) {
  if (grads.layers.size() != params.layers.size() || state.mean_sq.layers.size() != params.layers.size())
    throw DimensionMismatch("optimizer shapes do not match parameters");
  if (!grads.all_finite()) throw NonFiniteGradient();
  const Scalar decay(RmsPropState<Scalar>::kDecay);
  const Scalar eps(RmsPropState<Scalar>::kEps);
  auto update = [&](auto& param, const auto& grad, auto& v) {
    v = decay * v + (Scalar(1) - decay) * grad.cwiseAbs2();
    param.array() -= lr * grad.array() / (v.array() + eps).sqrt();
  };
  for (std::size_t k = 0; k < params.layers.size(); ++k) {
    update(params.layers[k].weight, grads.layers[k].weight, state.mean_sq.layers[k].weight);
    update(params.layers[k].bias, grads.layers[k].bias, state.mean_sq.layers[k].bias);
  }
}

}  // namespace credit::ad
