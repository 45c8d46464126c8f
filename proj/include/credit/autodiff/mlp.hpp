#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace credit::ad {

template <typename Scalar>
using Tensor2 = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
// Batches are feature-major: one column per sample.
template <typename Scalar>
using Batch = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

class DimensionMismatch : public std::invalid_argument {
 public:
  explicit DimensionMismatch(const std::string& what)
      : std::invalid_argument("DimensionMismatch: " + what) {}
};

class NonFiniteGradient : public std::runtime_error {
 public:
  NonFiniteGradient() : std::runtime_error("NonFiniteGradient: gradient contains NaN or Inf") {}
};

template <typename Scalar>
struct Layer {
  Tensor2<Scalar> weight;  // out x in
  Vec<Scalar> bias;        // out
};

// Feedforward net: rectifier on hidden layers, identity on the output layer.
// The same type doubles as the gradient container for its own parameters.
template <typename Scalar = double>
struct MlpParams {
  std::vector<Layer<Scalar>> layers;

  int input_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.front().weight.cols()); }
  int output_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.back().weight.rows()); }

  // Zero-filled net with layer sizes dims[0] -> dims[1] -> ... -> dims.back().
  static MlpParams zeros(std::span<const int> dims) {
    MlpParams p;
    for (std::size_t i = 0; i + 1 < dims.size(); ++i)
      p.layers.push_back({Tensor2<Scalar>::Zero(dims[i + 1], dims[i]), Vec<Scalar>::Zero(dims[i + 1])});
    return p;
  }

  // Uniform in +-sqrt(6 / (fan_in + fan_out)), zero biases.
  template <typename Rng>
  static MlpParams glorot(std::span<const int> dims, Rng& rng) {
    MlpParams p = zeros(dims);
    for (auto& l : p.layers) {
      const double limit = std::sqrt(6.0 / static_cast<double>(l.weight.rows() + l.weight.cols()));
      std::uniform_real_distribution<double> u(-limit, limit);
      for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
        for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = static_cast<Scalar>(u(rng));
    }
    return p;
  }

  MlpParams zeros_like() const {
    MlpParams p;
    for (const auto& l : layers)
      p.layers.push_back({Tensor2<Scalar>::Zero(l.weight.rows(), l.weight.cols()), Vec<Scalar>::Zero(l.bias.size())});
    return p;
  }

  void check_chain() const {
    for (std::size_t i = 0; i < layers.size(); ++i) {
      if (layers[i].bias.size() != layers[i].weight.rows())
        throw DimensionMismatch("layer " + std::to_string(i) + " bias length != weight rows");
      if (i > 0 && layers[i].weight.cols() != layers[i - 1].weight.rows())
        throw DimensionMismatch("layer " + std::to_string(i) + " input does not chain");
    }
  }

  bool all_finite() const {
    for (const auto& l : layers)
      if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
    return true;
  }

  friend bool operator==(const MlpParams& a, const MlpParams& b) {
    if (a.layers.size() != b.layers.size()) return false;
    for (std::size_t i = 0; i < a.layers.size(); ++i) {
      const auto& x = a.layers[i];
      const auto& y = b.layers[i];
      if (x.weight.rows() != y.weight.rows() || x.weight.cols() != y.weight.cols() ||
          x.weight != y.weight || x.bias != y.bias)
        return false;
    }
    return true;
  }
};

template <typename Scalar>
std::int64_t param_count(const MlpParams<Scalar>& p) {
  std::int64_t n = 0;
  for (const auto& l : p.layers) n += l.weight.size() + l.bias.size();
  return n;
}

// Activations recorded by a batched forward pass. inputs[k] is the input to
// layer k; pre[k] its pre-activation.
template <typename Scalar>
struct MlpTape {
  std::vector<Batch<Scalar>> inputs;
  std::vector<Batch<Scalar>> pre;
};

template <typename Scalar>
Batch<Scalar> mlp_forward_batch(const MlpParams<Scalar>& p, const Batch<Scalar>& x,
                                MlpTape<Scalar>* tape = nullptr) {
  if (x.rows() != p.input_dim())
    throw DimensionMismatch("input has " + std::to_string(x.rows()) + " features, net expects " +
                            std::to_string(p.input_dim()));
  if (tape) {
    tape->inputs.clear();
    tape->pre.clear();
  }
  Batch<Scalar> h = x;
  for (std::size_t k = 0; k < p.layers.size(); ++k) {
    const auto& l = p.layers[k];
    Batch<Scalar> z = l.weight * h;
    z.colwise() += l.bias;
    if (tape) {
      tape->inputs.push_back(std::move(h));
      tape->pre.push_back(z);
    }
    h = (k + 1 < p.layers.size()) ? Batch<Scalar>(z.cwiseMax(Scalar(0))) : std::move(z);
  }
  return h;
}

template <typename Scalar>
Vec<Scalar> mlp_forward(const MlpParams<Scalar>& p, const Vec<Scalar>& x) {
  return mlp_forward_batch<Scalar>(p, x).col(0);
}

template <typename Scalar>
struct BatchGradients {
  MlpParams<Scalar> params;  // summed over the batch
  Batch<Scalar> inputs;
};

// Reverse pass of sum_j upstream.col(j) . output.col(j) given a recorded tape.
template <typename Scalar>
BatchGradients<Scalar> mlp_backward_batch(const MlpParams<Scalar>& p, const MlpTape<Scalar>& tape,
                                          const Batch<Scalar>& upstream) {
  if (tape.pre.size() != p.layers.size())
    throw DimensionMismatch("tape does not match network depth");
  if (upstream.rows() != p.output_dim() || upstream.cols() != tape.pre.back().cols())
    throw DimensionMismatch("upstream shape does not match forward output");
  BatchGradients<Scalar> g{p.zeros_like(), {}};
  Batch<Scalar> delta = upstream;
  for (std::size_t k = p.layers.size(); k-- > 0;) {
    if (k + 1 < p.layers.size())
      delta = delta.cwiseProduct((tape.pre[k].array() > Scalar(0)).template cast<Scalar>().matrix());
    g.params.layers[k].weight.noalias() = delta * tape.inputs[k].transpose();
    g.params.layers[k].bias = delta.rowwise().sum();
    delta = p.layers[k].weight.transpose() * delta;
  }
  g.inputs = std::move(delta);
  return g;
}

template <typename Scalar>
struct Gradients {
  MlpParams<Scalar> params;
  Vec<Scalar> input;
};

template <typename Scalar>
Gradients<Scalar> mlp_backward(const MlpParams<Scalar>& p, const Vec<Scalar>& input,
                               const Vec<Scalar>& upstream) {
  MlpTape<Scalar> tape;
  mlp_forward_batch<Scalar>(p, input, &tape);
  auto g = mlp_backward_batch<Scalar>(p, tape, upstream);
  return {std::move(g.params), g.inputs.col(0)};
}

// a += scale * b, layer by layer.
template <typename Scalar>
void axpy(MlpParams<Scalar>& a, Scalar scale, const MlpParams<Scalar>& b) {
  for (std::size_t k = 0; k < a.layers.size(); ++k) {
    a.layers[k].weight += scale * b.layers[k].weight;
    a.layers[k].bias += scale * b.layers[k].bias;
  }
}

template <typename Scalar>
Scalar squared_norm(const MlpParams<Scalar>& p) {
  Scalar s(0);
  for (const auto& l : p.layers) s += l.weight.squaredNorm() + l.bias.squaredNorm();
  return s;
}

template <typename Scalar>
void scale(MlpParams<Scalar>& p, Scalar factor) {
  for (auto& l : p.layers) {
    l.weight *= factor;
    l.bias *= factor;
  }
}

// Flat views, layer by layer, weights row-major then bias.
template <typename Scalar>
std::vector<Scalar> flatten(const MlpParams<Scalar>& p) {
  std::vector<Scalar> out;
  out.reserve(static_cast<std::size_t>(param_count(p)));
  for (const auto& l : p.layers) {
    out.insert(out.end(), l.weight.data(), l.weight.data() + l.weight.size());
    out.insert(out.end(), l.bias.data(), l.bias.data() + l.bias.size());
  }
  return out;
}

template <typename Scalar>
void unflatten(MlpParams<Scalar>& p, std::span<const Scalar> values) {
  if (static_cast<std::int64_t>(values.size()) != param_count(p))
    throw DimensionMismatch("flat parameter count does not match network");
  std::size_t at = 0;
  for (auto& l : p.layers) {
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(at), l.weight.size(), l.weight.data());
    at += static_cast<std::size_t>(l.weight.size());
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(at), l.bias.size(), l.bias.data());
    at += static_cast<std::size_t>(l.bias.size());
  }
}

}  // namespace credit::ad
