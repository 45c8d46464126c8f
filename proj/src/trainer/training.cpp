#include "credit/trainer/training.hpp"

#include <charconv>
#include <fstream>
#include <random>
#include <stdexcept>

#include "credit/trainer/policy.hpp"

namespace credit::train {
namespace {

std::string fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (std::uint64_t(out[0]) << 32) | out[1];
}

constexpr std::uint64_t kEvalSeedOffset = 1'000'000'007ULL;

}  // namespace

double EpsilonSchedule::at(std::int64_t step) const {
  if (step >= anneal_steps) return end;
  const double frac = static_cast<double>(step) / static_cast<double>(anneal_steps);
  return start + (end - start) * frac;
}

void TrainConfig::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in [0, 1)");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be positive");
  if (buffer_capacity < static_cast<std::size_t>(batch_size))
    throw std::invalid_argument("buffer_capacity must hold at least one batch");
  if (!(lr > 0.0)) throw std::invalid_argument("lr must be positive");
  if (target_update_interval < 1) throw std::invalid_argument("target_update_interval must be positive");
  if (epsilon.anneal_steps <= 0) throw std::invalid_argument("epsilon anneal_steps must be positive");
  if (epsilon.start < 0 || epsilon.start > 1 || epsilon.end < 0 || epsilon.end > 1)
    throw std::invalid_argument("epsilon values must lie in [0, 1]");
  if (total_steps < 0 || warmup_steps < 0) throw std::invalid_argument("step counts must be non-negative");
  if (eval_interval < 1 || eval_episodes < 1 || log_interval < 1)
    throw std::invalid_argument("eval_interval, eval_episodes and log_interval must be positive");
  if (hidden.empty()) throw std::invalid_argument("agent network needs at least one hidden layer");
  for (int h : hidden)
    if (h < 1) throw std::invalid_argument("hidden layer widths must be positive");
  if (grad_clip < 0.0) throw std::invalid_argument("grad_clip must be >= 0");
  if (stop_at_success < 0.0 || stop_at_success > 1.0) throw std::invalid_argument("stop_at_success must lie in [0, 1]");
}

void MetricsLog::add(MetricsRow row) {
  if (!rows_.empty() && row.env_step <= rows_.back().env_step)
    throw std::logic_error("metrics rows must have strictly increasing env_step");
  rows_.push_back(std::move(row));
}

std::string MetricsLog::to_csv() const {
  std::string out = kHeader;
  out += '\n';
  auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string("-"); };
  for (const auto& r : rows_) {
    out += std::to_string(r.env_step) + ',' + opt(r.loss) + ',' + fmt(r.epsilon) + ',' + opt(r.eval_mean_return) +
           ',' + opt(r.eval_success_rate) + '\n';
  }
  return out;
}

void MetricsLog::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_csv();
}

ad::Checkpoint TrainResult::checkpoint(std::uint64_t seed) const {
  ad::Checkpoint c;
  c.seed = seed;
  c.step = steps_run;
  c.nets.push_back({"agent", agent});
  if (const auto* m = std::get_if<mix::MonotonicHypernet<double>>(&mixer)) {
    c.nets.push_back({"hyper_w1", m->hyper_w1});
    c.nets.push_back({"hyper_b1", m->hyper_b1});
    c.nets.push_back({"hyper_w2", m->hyper_w2});
    c.nets.push_back({"hyper_v", m->hyper_v});
  }
  return c;
}

ad::MlpParams<double> init_agent(const env::MultiAgentEnv& env, const std::vector<int>& hidden, std::uint64_t seed) {
  std::vector<int> dims{agent_input_dim(env.obs_dim(), env.n_actions(), env.n_agents())};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(env.n_actions());
  std::mt19937_64 rng(stream_seed(seed, 1));
  return ad::MlpParams<double>::glorot(dims, rng);
}

TrainResult run_training(env::MultiAgentEnv& env, mix::MixerSpec mixer, const TrainConfig& config,
                         const RowCallback& on_row) {
  config.validate();
  const bool is_tfcaf = std::holds_alternative<mix::Tfcaf>(mixer);
  Learner learner(init_agent(env, config.hidden, config.seed), std::move(mixer),
                  {config.gamma, config.lr, config.grad_clip});
  ReplayBuffer buffer(config.buffer_capacity);
  std::mt19937_64 act_rng(stream_seed(config.seed, 2));
  std::mt19937_64 sample_rng(stream_seed(config.seed, 3));
  const std::uint64_t episode_seed_base = stream_seed(config.seed, 4);

  TrainResult result;
  auto emit = [&](MetricsRow row) {
    if (on_row) on_row(row);
    result.log.add(std::move(row));
  };

  std::int64_t episode = 0;
  env.reset(episode_seed_base + episode);
  double reward_scale = 1.0;
  auto refresh_scale = [&] {
    reward_scale = 1.0;
    if (!config.normalize_returns) return;
    if (const auto* lbf = dynamic_cast<const env::LbfTask*>(&env)) reward_scale = 1.0 / lbf->raw().total_food_level();
  };
  refresh_scale();
  Eigen::MatrixXd inputs = encode_agent_inputs(env);
  Eigen::VectorXd state = env.state();
  bool episode_negative = false;

  double loss_sum = 0.0;
  int loss_count = 0;
  std::int64_t step = 0;
  while (step < config.total_steps) {
    const double eps = config.epsilon.at(step);
    ++step;
    const auto actions = epsilon_greedy(agent_q_values(learner.agent(), inputs), eps, act_rng);
    if (is_tfcaf) {
      const auto out = mix::mix(learner.mixer(), Eigen::VectorXd::Zero(env.n_agents()), state);
      if ((out.dq.array() < 0.0).any()) {
        ++result.negative_weight_steps;
        episode_negative = true;
      }
    }
    const auto st = env.step(actions);
    Transition t{state, inputs, actions, st.reward * reward_scale, env.state(), encode_agent_inputs(env), st.terminated};
    if (st.done) {
      if (episode_negative) result.negative_weight_episodes.push_back(episode);
      episode_negative = false;
      ++episode;
      env.reset(episode_seed_base + static_cast<std::uint64_t>(episode));
      refresh_scale();
      inputs = encode_agent_inputs(env);
      state = env.state();
    } else {
      inputs = t.next_obs;
      state = t.next_state;
    }
    buffer.push(std::move(t));

    if (step > config.warmup_steps && buffer.size() >= static_cast<std::size_t>(config.batch_size)) {
      const auto batch = buffer.sample(static_cast<std::size_t>(config.batch_size), sample_rng);
      loss_sum += learner.train_step(batch).loss;
      ++loss_count;
      ++result.updates;
    }
    if (step % config.target_update_interval == 0) learner.sync_target();

    const bool eval_now = step % config.eval_interval == 0 || step == config.total_steps;
    if (eval_now || step % config.log_interval == 0) {
      MetricsRow row;
      row.env_step = step;
      row.epsilon = eps;
      if (loss_count > 0) row.loss = loss_sum / loss_count;
      loss_sum = 0.0;
      loss_count = 0;
      if (eval_now) {
        GreedyQPolicy policy(learner.agent());
        const auto ev = evaluate_policy(policy, env, config.eval_episodes, config.seed + kEvalSeedOffset);
        row.eval_mean_return = ev.mean_return;
        row.eval_success_rate = ev.success_rate;
        if (config.stop_at_success > 0.0 && ev.success_rate >= config.stop_at_success && !result.threshold_step)
          result.threshold_step = step;
      }
      emit(std::move(row));
      if (result.threshold_step) break;
    }
  }

  result.steps_run = step;
  result.episodes = episode;
  result.agent = learner.agent();
  result.mixer = learner.mixer();
  return result;
}

}  // namespace credit::train
