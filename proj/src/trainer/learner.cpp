#include "credit/trainer/learner.hpp"

#include <cmath>

#include "credit/common/digest.hpp"

namespace credit::train {

int agent_input_dim(int obs_dim, int n_actions, int n_agents) { return obs_dim + n_actions + n_agents; }

Eigen::MatrixXd encode_agent_inputs(const env::MultiAgentEnv& env) {
  const int n = env.n_agents();
  const int obs = env.obs_dim();
  const int acts = env.n_actions();
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(agent_input_dim(obs, acts, n), n);
  for (int i = 0; i < n; ++i) {
    x.col(i).head(obs) = env.observation(i);
    const int last = env.last_action(i);
    if (last >= 0) x(obs + last, i) = 1.0;
    x(obs + acts + i, i) = 1.0;
  }
  return x;
}

Eigen::MatrixXd agent_q_values(const ad::MlpParams<double>& agent, const Eigen::MatrixXd& inputs) {
  return ad::mlp_forward_batch<double>(agent, inputs);
}

int greedy_action(const Eigen::Ref<const Eigen::VectorXd>& q) {
  int best = 0;
  for (int a = 1; a < q.size(); ++a)
    if (q(a) > q(best)) best = a;
  return best;
}

std::vector<int> epsilon_greedy(const Eigen::MatrixXd& q, double epsilon, std::mt19937_64& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> any(0, static_cast<int>(q.rows()) - 1);
  std::vector<int> actions(q.cols());
  for (Eigen::Index i = 0; i < q.cols(); ++i) {
    // Both draws happen every time so the random stream does not depend on q.
    const bool explore = coin(rng) < epsilon;
    const int random_action = any(rng);
    actions[i] = explore ? random_action : greedy_action(q.col(i));
  }
  return actions;
}

namespace {

// Stacks per-item agent inputs into one matrix: column b * n + i.
Eigen::MatrixXd stack_inputs(Batch batch, bool next) {
  const auto& first = next ? batch.front()->next_obs : batch.front()->obs;
  const Eigen::Index n = first.cols();
  Eigen::MatrixXd x(first.rows(), n * static_cast<Eigen::Index>(batch.size()));
  for (std::size_t b = 0; b < batch.size(); ++b)
    x.middleCols(static_cast<Eigen::Index>(b) * n, n) = next ? batch[b]->next_obs : batch[b]->obs;
  return x;
}

Eigen::MatrixXd stack_states(Batch batch, bool next) {
  const auto& first = next ? batch.front()->next_state : batch.front()->state;
  Eigen::MatrixXd s(first.size(), static_cast<Eigen::Index>(batch.size()));
  for (std::size_t b = 0; b < batch.size(); ++b) s.col(static_cast<Eigen::Index>(b)) = next ? batch[b]->next_state : batch[b]->state;
  return s;
}

}  // namespace

Eigen::RowVectorXd td_targets(Batch batch, const ad::MlpParams<double>& target_agent,
                              const mix::MixerSpec& target_mixer, double gamma) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  const Eigen::Index B = static_cast<Eigen::Index>(batch.size());
  const Eigen::Index n = batch.front()->obs.cols();
  Eigen::RowVectorXd y(B);
  if (gamma == 0.0) {
    for (Eigen::Index b = 0; b < B; ++b) y(b) = batch[b]->reward;
    return y;
  }
  const Eigen::MatrixXd q_next = ad::mlp_forward_batch<double>(target_agent, stack_inputs(batch, true));
  Eigen::MatrixXd q_max(n, B);
  for (Eigen::Index b = 0; b < B; ++b)
    for (Eigen::Index i = 0; i < n; ++i) q_max(i, b) = q_next.col(b * n + i).maxCoeff();
  const auto mixed = mix::mix_batch(target_mixer, q_max, stack_states(batch, true));
  for (Eigen::Index b = 0; b < B; ++b)
    y(b) = batch[b]->reward + (batch[b]->done ? 0.0 : gamma * mixed.q_tot(b));
  return y;
}

LossGradients loss_and_gradients(Batch batch, const Eigen::RowVectorXd& targets, const ad::MlpParams<double>& agent,
                                 const mix::MixerSpec& mixer) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  const Eigen::Index B = static_cast<Eigen::Index>(batch.size());
  const Eigen::Index n = batch.front()->obs.cols();
  if (targets.size() != B) throw std::invalid_argument("targets do not match batch size");

  ad::MlpTape<double> tape;
  const Eigen::MatrixXd q_all = ad::mlp_forward_batch<double>(agent, stack_inputs(batch, false), &tape);
  Eigen::MatrixXd q_taken(n, B);
  for (Eigen::Index b = 0; b < B; ++b)
    for (Eigen::Index i = 0; i < n; ++i) q_taken(i, b) = q_all(batch[b]->actions[i], b * n + i);

  const Eigen::MatrixXd states = stack_states(batch, false);
  auto mixed = mix::mix_batch(mixer, q_taken, states);
  const Eigen::RowVectorXd err = mixed.q_tot - targets;

  LossGradients out;
  out.loss = err.squaredNorm() / static_cast<double>(B);
  out.q_tot = mixed.q_tot;
  if (!std::isfinite(out.loss)) throw NonFiniteLoss(batch_digest(batch));

  const Eigen::RowVectorXd upstream = err * (2.0 / static_cast<double>(B));
  if (mix::learnable_param_count(mixer) > 0) out.mixer = mix::mix_batch(mixer, q_taken, states, &upstream).param_grads;

  Eigen::MatrixXd d_q = Eigen::MatrixXd::Zero(q_all.rows(), q_all.cols());
  for (Eigen::Index b = 0; b < B; ++b)
    for (Eigen::Index i = 0; i < n; ++i) d_q(batch[b]->actions[i], b * n + i) = upstream(b) * mixed.dq(i, b);
  out.agent = std::move(ad::mlp_backward_batch<double>(agent, tape, d_q).params);
  return out;
}

std::string batch_digest(Batch batch) {
  std::string bytes;
  for (const auto* t : batch) {
    bytes.append(reinterpret_cast<const char*>(t->state.data()), sizeof(double) * t->state.size());
    bytes.append(reinterpret_cast<const char*>(&t->reward), sizeof(double));
    for (int a : t->actions) bytes.append(reinterpret_cast<const char*>(&a), sizeof(int));
  }
  return sha256_hex(bytes).substr(0, 16);
}

Learner::Learner(ad::MlpParams<double> agent, mix::MixerSpec mixer, LearnerConfig config)
    : agent_(std::move(agent)),
      target_agent_(agent_),
      mixer_(std::move(mixer)),
      target_mixer_(mixer_),
      config_(config),
      agent_opt_(ad::RmsPropState<double>::for_params(agent_)) {
  if (!(config_.gamma >= 0.0 && config_.gamma < 1.0)) throw std::invalid_argument("gamma must lie in [0, 1)");
  if (!(config_.lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (auto* m = std::get_if<mix::MonotonicHypernet<double>>(&mixer_))
    for (auto* net : m->nets()) mixer_opt_.push_back(ad::RmsPropState<double>::for_params(*net));
}

StepStats Learner::train_step(Batch batch) {
  const auto y = td_targets(batch, target_agent_, target_mixer_, config_.gamma);
  auto grads = loss_and_gradients(batch, y, agent_, mixer_);

  double sq = ad::squared_norm(grads.agent);
  for (const auto& g : grads.mixer) sq += ad::squared_norm(g);
  const double norm = std::sqrt(sq);
  if (!std::isfinite(norm)) throw ad::NonFiniteGradient();
  if (config_.grad_clip > 0.0 && norm > config_.grad_clip) {
    const double f = config_.grad_clip / norm;
    ad::scale(grads.agent, f);
    for (auto& g : grads.mixer) ad::scale(g, f);
  }

  ad::sgd_adaptive_step(agent_, grads.agent, agent_opt_, config_.lr);
  if (auto* m = std::get_if<mix::MonotonicHypernet<double>>(&mixer_)) {
    auto nets = m->nets();
    for (std::size_t k = 0; k < nets.size(); ++k) ad::sgd_adaptive_step(*nets[k], grads.mixer[k], mixer_opt_[k], config_.lr);
  }
  return {grads.loss, norm};
}

void Learner::sync_target() {
  target_agent_ = agent_;
  target_mixer_ = mixer_;
}

}  // namespace credit::train
