#include "credit/dsl/probe.hpp"

#include <algorithm>
#include <limits>

#include "credit/dsl/interpreter.hpp"

namespace credit::dsl {

LbfStateSampler::LbfStateSampler(env::LbfConfig config) : config_(config) { config_.validate(); }

Eigen::VectorXd LbfStateSampler::sample(std::mt19937_64& rng) const {
  env::LbfEnv env(config_);
  env.reset(rng());
  std::uniform_int_distribution<int> steps(0, config_.max_steps - 1);
  std::uniform_int_distribution<int> action(0, env::kLbfActions - 1);
  const int n = steps(rng);
  std::vector<int> joint(static_cast<std::size_t>(config_.n_agents));
  for (int t = 0; t < n && !env.done(); ++t) {
    for (auto& a : joint) a = action(rng);
    env.step(joint);
  }
  return env.global_state();
}

std::vector<Eigen::VectorXd> boundary_states(int state_dim, double max_coordinate) {
  return {Eigen::VectorXd::Zero(state_dim), Eigen::VectorXd::Constant(state_dim, -1.0),
          Eigen::VectorXd::Constant(state_dim, max_coordinate)};
}

ProbeReport probe(const Program& program, const StateSampler& sampler, int n_probes, std::uint64_t seed) {
  ProbeReport report;
  report.n_probes = n_probes;
  std::mt19937_64 rng(seed);
  const auto boundary = boundary_states(sampler.state_dim(), sampler.max_coordinate());

  const int n_agents = program.binding ? program.binding->n_agents : 0;
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(n_agents, std::numeric_limits<double>::infinity());
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(n_agents, -std::numeric_limits<double>::infinity());
  Eigen::VectorXd total = Eigen::VectorXd::Zero(n_agents);
  int successes = 0;

  for (int i = 0; i < n_probes; ++i) {
    const Eigen::VectorXd state =
        static_cast<std::size_t>(i) < boundary.size() ? boundary[static_cast<std::size_t>(i)] : sampler.sample(rng);
    try {
      const auto wb = eval_weights_bias(program, state);
      lo = lo.cwiseMin(wb.weights);
      hi = hi.cwiseMax(wb.weights);
      total += wb.weights;
      ++successes;
      if ((wb.weights.array() < 0.0).any()) report.negative_weight_seen = true;
    } catch (const DslRuntimeError& e) {
      ++report.failure_count;
      if (report.failures.size() < ProbeReport::kMaxRecordedFailures)
        report.failures.push_back({e.state_digest(), to_string(e.kind()), e.what()});
    }
  }

  report.weight_stats.resize(static_cast<std::size_t>(n_agents));
  if (successes > 0)
    for (int a = 0; a < n_agents; ++a)
      report.weight_stats[static_cast<std::size_t>(a)] = {lo[a], hi[a], total[a] / successes};
  return report;
}

}  // namespace credit::dsl
