#include "credit/mixers/mixer.hpp"

#include "credit/dsl/interpreter.hpp"

namespace credit::mix {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

std::string mixer_kind(const MixerSpec& spec) {
  return std::visit(overloaded{[](const VdnSum&) { return std::string("vdn"); },
                               [](const MonotonicHypernet<double>&) { return std::string("monotonic"); },
                               [](const Tfcaf&) { return std::string("tfcaf"); }},
                    spec);
}

MixBatch mix_batch(const MixerSpec& spec, const Eigen::MatrixXd& q, const Eigen::MatrixXd& states,
                   const Eigen::RowVectorXd* upstream) {
  if (q.cols() != states.cols()) throw ad::DimensionMismatch("q and state batch sizes differ");
  return std::visit(
      overloaded{
          [&](const VdnSum&) {
            return MixBatch{q.colwise().sum(), Eigen::MatrixXd::Ones(q.rows(), q.cols()), {}};
          },
          [&](const Tfcaf& t) {
            if (t.program->binding && t.program->binding->n_agents != q.rows())
              throw ad::DimensionMismatch("TFCAF bound to " + std::to_string(t.program->binding->n_agents) +
                                          " agents, got q of length " + std::to_string(q.rows()));
            auto wb = dsl::eval_weights_bias_batch(*t.program, states);
            Eigen::RowVectorXd q_tot = wb.weights.cwiseProduct(q).colwise().sum() + wb.bias;
            return MixBatch{std::move(q_tot), std::move(wb.weights), {}};
          },
          [&](const MonotonicHypernet<double>& m) {
            const Eigen::RowVectorXd ones = Eigen::RowVectorXd::Ones(q.cols());
            auto r = monotonic_mix<double>(m, q, states, upstream ? *upstream : ones, upstream != nullptr);
            return MixBatch{std::move(r.q_tot), std::move(r.dq), std::move(r.param_grads)};
          },
      },
      spec);
}

MixOutput mix(const MixerSpec& spec, const Eigen::VectorXd& q, const Eigen::VectorXd& state) {
  const Eigen::RowVectorXd one = Eigen::RowVectorXd::Ones(1);
  const bool learnable = std::holds_alternative<MonotonicHypernet<double>>(spec);
  auto b = mix_batch(spec, q, state, learnable ? &one : nullptr);
  return {b.q_tot(0), b.dq.col(0), std::move(b.param_grads)};
}

std::int64_t learnable_param_count(const MixerSpec& spec) {
  if (const auto* m = std::get_if<MonotonicHypernet<double>>(&spec)) return m->param_count();
  return 0;
}

MixerSpec make_tfcaf(dsl::Program program) {
  if (!program.binding) throw std::invalid_argument("make_tfcaf: program has not been validated");
  return Tfcaf{std::make_shared<const dsl::Program>(std::move(program))};
}

}  // namespace credit::mix
