#pragma once

#include <cstdint>
#include <vector>

#include "credit/autodiff/mlp.hpp"

namespace credit::mix {

// State-conditioned two-layer mixer with non-negative mixing weights:
//
//   hidden = elu(q^T |W1(s)| + b1(s)),   q_tot = hidden . |w2(s)| + v(s)
//
// Each of W1 (n x embed), b1 (embed), w2 (embed) and v (scalar) comes from its
// own single-hidden-layer hypernetwork over the global state.
template <typename Scalar = double>
struct MonotonicHypernet {
  int n_agents = 0;
  int state_dim = 0;
  int embed_dim = 0;
  int hidden = 64;
  ad::MlpParams<Scalar> hyper_w1;
  ad::MlpParams<Scalar> hyper_b1;
  ad::MlpParams<Scalar> hyper_w2;
  ad::MlpParams<Scalar> hyper_v;

  template <typename Rng>
  static MonotonicHypernet init(int n_agents, int state_dim, int embed_dim, int hidden, Rng& rng) {
    MonotonicHypernet m{n_agents, state_dim, embed_dim, hidden, {}, {}, {}, {}};
    const int w1[] = {state_dim, hidden, n_agents * embed_dim};
    const int b1[] = {state_dim, hidden, embed_dim};
    const int w2[] = {state_dim, hidden, embed_dim};
    const int v[] = {state_dim, hidden, 1};
    m.hyper_w1 = ad::MlpParams<Scalar>::glorot(w1, rng);
    m.hyper_b1 = ad::MlpParams<Scalar>::glorot(b1, rng);
    m.hyper_w2 = ad::MlpParams<Scalar>::glorot(w2, rng);
    m.hyper_v = ad::MlpParams<Scalar>::glorot(v, rng);
    return m;
  }

  std::vector<ad::MlpParams<Scalar>*> nets() { return {&hyper_w1, &hyper_b1, &hyper_w2, &hyper_v}; }
  std::vector<const ad::MlpParams<Scalar>*> nets() const { return {&hyper_w1, &hyper_b1, &hyper_w2, &hyper_v}; }

  std::int64_t param_count() const {
    std::int64_t n = 0;
    for (const auto* p : nets()) n += ad::param_count(*p);
    return n;
  }
};

template <typename Scalar>
struct MonotonicResult {
  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> q_tot;      // batch
  ad::Batch<Scalar> dq;                                // n x batch, dq_tot/dq_i
  std::vector<ad::MlpParams<Scalar>> param_grads;      // w1, b1, w2, v; upstream-weighted sums
};

// Forward and reverse pass over a batch. `upstream` weights each sample's
// q_tot in the parameter gradients; dq is the unweighted Jacobian.
template <typename Scalar>
MonotonicResult<Scalar> monotonic_mix(const MonotonicHypernet<Scalar>& m, const ad::Batch<Scalar>& q,
                                      const ad::Batch<Scalar>& states,
                                      const Eigen::Matrix<Scalar, 1, Eigen::Dynamic>& upstream,
                                      bool want_param_grads = true) {
  const Eigen::Index batch = q.cols();
  const int n = m.n_agents;
  const int e = m.embed_dim;
  if (q.rows() != n || states.rows() != m.state_dim || states.cols() != batch || upstream.size() != batch)
    throw ad::DimensionMismatch("monotonic mixer inputs do not match its dimensions");

  ad::MlpTape<Scalar> t_w1, t_b1, t_w2, t_v;
  const ad::Batch<Scalar> raw_w1 = ad::mlp_forward_batch(m.hyper_w1, states, &t_w1);  // (n*e) x B
  const ad::Batch<Scalar> b1 = ad::mlp_forward_batch(m.hyper_b1, states, &t_b1);      // e x B
  const ad::Batch<Scalar> raw_w2 = ad::mlp_forward_batch(m.hyper_w2, states, &t_w2);  // e x B
  const ad::Batch<Scalar> v = ad::mlp_forward_batch(m.hyper_v, states, &t_v);         // 1 x B

  const ad::Batch<Scalar> w1 = raw_w1.cwiseAbs();
  const ad::Batch<Scalar> w2 = raw_w2.cwiseAbs();

  ad::Batch<Scalar> pre = b1;
  for (int i = 0; i < n; ++i)
    pre += (w1.middleRows(i * e, e).array().rowwise() * q.row(i).array()).matrix();
  const auto pos = (pre.array() > Scalar(0));
  const ad::Batch<Scalar> hidden = pos.select(pre.array(), pre.array().exp() - Scalar(1)).matrix();
  const ad::Batch<Scalar> elu_grad = pos.select(ad::Batch<Scalar>::Ones(e, batch).array(), pre.array().exp()).matrix();

  MonotonicResult<Scalar> out;
  out.q_tot = (hidden.cwiseProduct(w2)).colwise().sum() + v.row(0);

  // d q_tot / d pre, per unit upstream.
  const ad::Batch<Scalar> dpre = w2.cwiseProduct(elu_grad);
  out.dq.resize(n, batch);
  for (int i = 0; i < n; ++i) out.dq.row(i) = w1.middleRows(i * e, e).cwiseProduct(dpre).colwise().sum();

  if (!want_param_grads) return out;

  const auto g = upstream.array();
  const ad::Batch<Scalar> dpre_g = (dpre.array().rowwise() * g).matrix();
  ad::Batch<Scalar> d_raw_w1(n * e, batch);
  for (int i = 0; i < n; ++i)
    d_raw_w1.middleRows(i * e, e) =
        (dpre_g.array().rowwise() * q.row(i).array()).matrix().cwiseProduct(raw_w1.middleRows(i * e, e).cwiseSign());
  const ad::Batch<Scalar> d_raw_w2 = (hidden.array().rowwise() * g).matrix().cwiseProduct(raw_w2.cwiseSign());
  const ad::Batch<Scalar> d_v = upstream;

  out.param_grads.push_back(ad::mlp_backward_batch(m.hyper_w1, t_w1, d_raw_w1).params);
  out.param_grads.push_back(ad::mlp_backward_batch(m.hyper_b1, t_b1, dpre_g).params);
  out.param_grads.push_back(ad::mlp_backward_batch(m.hyper_w2, t_w2, d_raw_w2).params);
  out.param_grads.push_back(ad::mlp_backward_batch(m.hyper_v, t_v, d_v).params);
  return out;
}

}  // namespace credit::mix
