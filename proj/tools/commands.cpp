#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "config.hpp"
#include "credit/autodiff/checkpoint.hpp"
#include "credit/autodiff/gradcheck.hpp"
#include "credit/codegen/artifact.hpp"
#include "credit/codegen/pipeline.hpp"
#include "credit/dsl/probe.hpp"
#include "credit/dsl/tfcaf_file.hpp"
#include "credit/oracle/fit.hpp"
#include "credit/trainer/policy.hpp"

namespace creditlab {
namespace {

using nlohmann::json;
namespace cg = credit::codegen;

RunConfig load_with(const CommonOptions& c, std::vector<std::string> extra) {
  std::vector<std::string> overrides = c.overrides;
  if (c.seed) overrides.push_back("seed=" + std::to_string(*c.seed));
  overrides.insert(overrides.end(), extra.begin(), extra.end());
  auto cfg = load_config(c.config, overrides);
  if (c.output_dir) cfg.output_dir = *c.output_dir;
  return cfg;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

// Config snapshot plus content digests of every input and output file.
void write_run_manifest(const RunConfig& cfg, const std::string& command, const std::vector<fs::path>& inputs,
                        const std::vector<fs::path>& outputs, json extra = json::object()) {
  json in = json::object();
  for (const auto& p : inputs)
    if (!p.empty()) in[p.string()] = file_digest(p);
  json outj = json::object();
  for (const auto& p : outputs) outj[p.filename().string()] = file_digest(p);
  json m{{"command", command},
         {"seed", cfg.seed},
         {"config_file", cfg.source_path.string()},
         {"config", cfg.to_json()},
         {"inputs", in},
         {"outputs", outj}};
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
  write_json(cfg.output_dir / (cfg.name + "." + command + ".run.json"), m);
}

std::unique_ptr<credit::dsl::StateSampler> make_sampler(const RunConfig& cfg, int state_dim) {
  if (cfg.env.kind == "lbf") return std::make_unique<credit::dsl::LbfStateSampler>(cfg.env.lbf);
  return std::make_unique<credit::dsl::FunctionSampler>(state_dim, 1.0, [state_dim](std::mt19937_64& rng) {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(state_dim);
    s(std::uniform_int_distribution<int>(0, state_dim - 1)(rng)) = 1.0;
    return s;
  });
}

std::vector<fs::path> config_inputs(const RunConfig& cfg) {
  std::vector<fs::path> in{cfg.source_path};
  if (cfg.env.kind == "matrix") in.push_back(cfg.env.game);
  if (cfg.mixer.kind == "tfcaf") in.push_back(cfg.mixer.artifact);
  return in;
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.1f%%", v * 100.0);
  return buf;
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const cg::NoViableCandidate& e) {
    err << e.what() << '\n';
    return kExitNoViableCandidate;
  } catch (const cg::ProviderError& e) {
    err << e.what() << '\n';
    return kExitProviderError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace

int cmd_synthesize(const SynthesizeOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::vector<std::string> extra;
    if (opts.k) extra.push_back("synth.k=" + std::to_string(*opts.k));
    if (opts.t) extra.push_back("synth.t=" + std::to_string(*opts.t));
    if (opts.r) extra.push_back("synth.r=" + std::to_string(*opts.r));
    if (opts.transcript) extra.push_back("synth.provider.transcript=" + fs::absolute(*opts.transcript).string());
    auto cfg = load_with(opts.common, extra);
    try {
      cfg.synth.provider.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    const auto env = make_env(cfg);
    const auto sampler = make_sampler(cfg, env->state_dim());
    auto prompts = cg::PromptSet::load(cfg.synth.prompts_dir, cfg.synth.task, env->n_agents(), env->state_dim());
    auto provider = cg::make_provider(cfg.synth.provider);
    cg::SynthesisSession session(*provider, std::move(prompts), *sampler, env->n_agents(), cfg.synth.synthesis);
    const auto artifact = session.run();
    const auto paths = cg::write_artifact(cfg.output_dir, cfg.synth.name, artifact);

    std::vector<fs::path> inputs = config_inputs(cfg);
    for (const char* f : {"coder_role.txt", "evaluator_role.txt"}) inputs.push_back(cfg.synth.prompts_dir / f);
    inputs.push_back(cfg.synth.prompts_dir / ("task_" + cfg.synth.task + ".txt"));
    if (cfg.synth.provider.mode == cg::ProviderMode::Scripted) inputs.push_back(cfg.synth.provider.transcript_path);
    write_run_manifest(cfg, "synthesize", inputs, {paths.tfcaf, paths.manifest});

    int repairs = 0;
    int evaluator_calls = 0;
    for (const auto& c : artifact.candidates) repairs += static_cast<int>(c.repair_history.size());
    for (const auto& s : artifact.selections) evaluator_calls += s.evaluator_calls;
    out << "synthesized " << paths.tfcaf.string() << "\n"
        << "  digest " << artifact.digest << "\n"
        << "  candidates " << artifact.candidates.size() << ", repairs " << repairs << ", selections "
        << artifact.selections.size() << ", evaluator calls " << evaluator_calls << "\n";
    for (const auto& w : artifact.warnings) out << "  warning: " << w << "\n";
    out << artifact.final_source;
    return kExitOk;
  });
}

namespace {

struct TrainRun {
  RunConfig cfg;
  std::int64_t agent_params = 0;
  std::int64_t mixer_params = 0;
  std::optional<credit::train::TrainResult> result;
};

TrainRun run_one(RunConfig cfg, bool train, bool quiet, std::ostream& out) {
  TrainRun run{std::move(cfg), 0, 0, std::nullopt};
  auto env = make_env(run.cfg);
  auto mixer = make_mixer(run.cfg, *env);
  run.agent_params = credit::ad::param_count(credit::train::init_agent(*env, run.cfg.train.hidden, run.cfg.seed));
  run.mixer_params = credit::mix::learnable_param_count(mixer);
  if (!train) return run;

  fs::create_directories(run.cfg.output_dir);
  const auto on_row = [&](const credit::train::MetricsRow& r) {
    if (quiet || !r.eval_success_rate) return;
    out << "  [" << run.cfg.name << "] step " << r.env_step << "  eps " << std::fixed << std::setprecision(3)
        << r.epsilon << "  return " << *r.eval_mean_return << "  success " << *r.eval_success_rate << std::defaultfloat
        << "\n";
    out.flush();
  };
  run.result = credit::train::run_training(*env, std::move(mixer), run.cfg.train, on_row);

  const auto& res = *run.result;
  const fs::path csv = run.cfg.output_dir / (run.cfg.name + ".metrics.csv");
  const fs::path ckpt = run.cfg.output_dir / (run.cfg.name + ".ckpt");
  const fs::path summary = run.cfg.output_dir / (run.cfg.name + ".summary.json");
  res.log.write_csv(csv);
  credit::ad::write_checkpoint(ckpt, res.checkpoint(run.cfg.seed));
  json s{{"mixer", run.cfg.mixer.kind},
         {"steps_run", res.steps_run},
         {"episodes", res.episodes},
         {"updates", res.updates},
         {"agent_params", run.agent_params},
         {"mixer_params", run.mixer_params},
         {"threshold_step", res.threshold_step ? json(*res.threshold_step) : json(nullptr)},
         {"negative_weight_steps", res.negative_weight_steps},
         {"negative_weight_episodes", res.negative_weight_episodes}};
  write_json(summary, s);
  write_run_manifest(run.cfg, "train", config_inputs(run.cfg), {csv, ckpt, summary});
  return run;
}

std::optional<std::int64_t> steps_to(const credit::train::MetricsLog& log, double threshold) {
  for (const auto& r : log.rows())
    if (r.eval_success_rate && *r.eval_success_rate >= threshold) return r.env_step;
  return std::nullopt;
}

std::optional<double> final_return(const credit::train::MetricsLog& log) {
  for (auto it = log.rows().rbegin(); it != log.rows().rend(); ++it)
    if (it->eval_mean_return) return *it->eval_mean_return;
  return std::nullopt;
}

}  // namespace

int cmd_train(const TrainOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::vector<std::string> extra;
    if (opts.steps) extra.push_back("train.total_steps=" + std::to_string(*opts.steps));
    if (opts.artifact) {
      extra.push_back("mixer.kind=tfcaf");
      extra.push_back("mixer.artifact=" + fs::absolute(*opts.artifact).string());
    }
    const auto run = run_one(load_with(opts.common, extra), true, opts.quiet, out);
    const auto& res = *run.result;
    out << "trained " << run.cfg.name << " (" << run.cfg.mixer.kind << ") for " << res.steps_run << " steps, "
        << res.updates << " updates\n";
    if (const auto fr = final_return(res.log)) out << "  final eval return " << *fr << "\n";
    if (res.negative_weight_steps > 0)
      out << "  negative mixer weights on " << res.negative_weight_steps << " steps in "
          << res.negative_weight_episodes.size() << " episodes\n";
    out << "  outputs in " << run.cfg.output_dir.string() << "\n";
    return kExitOk;
  });
}

int cmd_eval(const EvalOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto cfg = load_with(opts.common, {});
    auto env = make_env(cfg);
    credit::train::EvalResult res;
    std::vector<fs::path> inputs = config_inputs(cfg);
    if (opts.scripted) {
      credit::train::ScriptedLbfPolicy policy;
      res = credit::train::evaluate_policy(policy, *env, opts.episodes, cfg.seed);
    } else {
      const auto ckpt = credit::ad::read_checkpoint(opts.checkpoint);
      const auto& agent = ckpt.get("agent");
      const int expected = credit::train::agent_input_dim(env->obs_dim(), env->n_actions(), env->n_agents());
      if (agent.input_dim() != expected || agent.output_dim() != env->n_actions())
        throw ConfigError("checkpoint agent network is " + std::to_string(agent.input_dim()) + "->" +
                          std::to_string(agent.output_dim()) + " but the environment needs " +
                          std::to_string(expected) + "->" + std::to_string(env->n_actions()));
      credit::train::GreedyQPolicy policy(agent);
      res = credit::train::evaluate_policy(policy, *env, opts.episodes, cfg.seed);
      inputs.push_back(opts.checkpoint);
    }
    fs::create_directories(cfg.output_dir);
    const fs::path result_path = cfg.output_dir / (cfg.name + ".eval.json");
    write_json(result_path, {{"episodes", opts.episodes},
                             {"policy", opts.scripted ? "scripted" : "checkpoint"},
                             {"mean_return", res.mean_return},
                             {"success_rate", res.success_rate}});
    write_run_manifest(cfg, "eval", inputs, {result_path});
    out << "episodes " << opts.episodes << "  mean_return " << res.mean_return << "  success_rate "
        << res.success_rate << "\n";
    return kExitOk;
  });
}

int cmd_compare(const CompareOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opts.configs.size() < 2) throw ConfigError("compare needs at least two configs");
    if (opts.baseline >= opts.configs.size()) throw ConfigError("baseline index out of range");
    std::vector<TrainRun> runs;
    for (const auto& path : opts.configs) {
      CommonOptions c{path, opts.overrides, opts.seed, std::nullopt};
      auto cfg = load_with(c, {});
      cfg.output_dir = opts.output_dir;
      runs.push_back(run_one(std::move(cfg), !opts.params_only, opts.quiet, out));
    }

    const auto& base = runs[opts.baseline];
    const double base_total = static_cast<double>(base.agent_params + base.mixer_params);
    json rows = json::array();
    out << std::left << std::setw(26) << "run" << std::setw(11) << "mixer" << std::right << std::setw(13)
        << "agent_params" << std::setw(13) << "mixer_params" << std::setw(13) << "total" << std::setw(11)
        << "reduction";
    if (!opts.params_only) out << std::setw(18) << "steps_to_thresh" << std::setw(14) << "final_return";
    out << "\n";
    for (const auto& r : runs) {
      const std::int64_t total = r.agent_params + r.mixer_params;
      const double reduction = 1.0 - static_cast<double>(total) / base_total;
      json row{{"name", r.cfg.name},
               {"config", r.cfg.source_path.string()},
               {"mixer", r.cfg.mixer.kind},
               {"agent_params", r.agent_params},
               {"mixer_params", r.mixer_params},
               {"total_params", total},
               {"reduction_vs_baseline", reduction}};
      out << std::left << std::setw(26) << r.cfg.name << std::setw(11) << r.cfg.mixer.kind << std::right
          << std::setw(13) << r.agent_params << std::setw(13) << r.mixer_params << std::setw(13) << total
          << std::setw(11) << pct(reduction);
      if (r.result) {
        const auto hit = steps_to(r.result->log, opts.threshold);
        const std::int64_t steps = hit ? *hit : r.cfg.train.total_steps;
        const auto fr = final_return(r.result->log);
        row["steps_to_threshold"] = steps;
        row["threshold_reached"] = hit.has_value();
        row["final_return"] = fr ? json(*fr) : json(nullptr);
        out << std::setw(17) << steps << (hit ? " " : "*") << std::setw(14) << (fr ? *fr : 0.0);
      }
      out << "\n";
      rows.push_back(std::move(row));
    }
    if (!opts.params_only) out << "(* threshold " << opts.threshold << " not reached; budget reported)\n";
    fs::create_directories(opts.output_dir);
    write_json(opts.output_dir / "compare.json", {{"baseline", opts.baseline},
                                                  {"threshold", opts.threshold},
                                                  {"params_only", opts.params_only},
                                                  {"runs", rows}});
    return kExitOk;
  });
}

int cmd_gradcheck(const GradcheckOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opts.trials < 1) throw ConfigError("--trials must be at least 1");
    std::mt19937_64 rng(opts.seed);
    double worst = 0.0;
    for (int trial = 0; trial < opts.trials; ++trial) {
      std::vector<int> dims;
      if (trial == 0) {
        dims = {14, 64, 6};
      } else {
        std::uniform_int_distribution<int> width(2, 24);
        dims.push_back(width(rng));
        const int depth = std::uniform_int_distribution<int>(1, 2)(rng);
        for (int d = 0; d < depth; ++d) dims.push_back(width(rng));
        dims.push_back(std::uniform_int_distribution<int>(2, 8)(rng));
      }
      auto params = credit::ad::MlpParams<double>::glorot(dims, rng);
      Eigen::VectorXd x(dims.front());
      std::normal_distribution<double> normal(0.0, 1.0);
      for (auto& v : x) v = normal(rng);
      const auto rep = credit::ad::finite_diff_check(
          params, x, {opts.epsilon, opts.seed * 1000 + static_cast<std::uint64_t>(trial), opts.inject_fault});
      worst = std::max(worst, rep.max_rel_error);
      out << "trial " << trial << "  net";
      for (int d : dims) out << (d == dims.front() ? " " : "->") << d;
      out << "  compared " << rep.compared << "  kinks " << rep.skipped_kinks << "  max_rel_error "
          << std::scientific << std::setprecision(3) << rep.max_rel_error << std::defaultfloat
          << (rep.max_rel_error < opts.tolerance ? "  ok" : "  FAIL") << "\n";
    }
    const bool pass = worst < opts.tolerance;
    out << (pass ? "PASS" : "FAIL") << "  worst " << std::scientific << worst << std::defaultfloat << " (tolerance "
        << opts.tolerance << ")\n";
    return pass ? kExitOk : kExitCheckFailed;
  });
}

int cmd_fit(const FitOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::ifstream in(opts.game);
    if (!in) throw ConfigError("cannot read game file " + opts.game.string());
    const auto game = credit::env::MatrixGame::from_json(json::parse(in));
    const auto fit = credit::oracle::representability_fit(game, opts.gamma);
    out << "state  weights                     bias        residual_rms\n";
    json states = json::array();
    for (int s = 0; s < game.n_states; ++s) {
      if (!fit.fitted[s]) {
        out << std::setw(5) << s << "  (terminal, not fitted)\n";
        continue;
      }
      std::ostringstream w;
      w << std::setprecision(6);
      for (int i = 0; i < game.n_agents; ++i) w << (i ? " " : "") << fit.per_state_weights(s, i);
      out << std::setw(5) << s << "  " << std::left << std::setw(28) << w.str() << std::setw(12)
          << fit.per_state_bias(s) << std::right << std::scientific << std::setprecision(3)
          << fit.per_state_residual(s) << std::defaultfloat << (fit.degenerate[s] ? "  degenerate" : "") << "\n";
      json ws = json::array();
      for (int i = 0; i < game.n_agents; ++i) ws.push_back(fit.per_state_weights(s, i));
      states.push_back({{"state", s},
                        {"weights", ws},
                        {"bias", fit.per_state_bias(s)},
                        {"residual_rms", fit.per_state_residual(s)},
                        {"degenerate", static_cast<bool>(fit.degenerate[s])}});
    }
    out << std::scientific << std::setprecision(3) << "per-state residual_rms       " << fit.residual_rms << "\n"
        << "constant-weight residual_rms " << fit.constant_weight_residual_rms << std::defaultfloat << "\n";
    if (opts.output) {
      json cw = json::array();
      for (int i = 0; i < game.n_agents; ++i) cw.push_back(fit.constant_weights(i));
      if (opts.output->has_parent_path()) fs::create_directories(opts.output->parent_path());
      write_json(*opts.output, {{"game", opts.game.string()},
                                {"game_digest", file_digest(opts.game)},
                                {"gamma", opts.gamma},
                                {"states", states},
                                {"residual_rms", fit.residual_rms},
                                {"constant_weights", cw},
                                {"constant_bias", fit.constant_bias},
                                {"constant_weight_residual_rms", fit.constant_weight_residual_rms}});
    }
    return kExitOk;
  });
}

}  // namespace creditlab
