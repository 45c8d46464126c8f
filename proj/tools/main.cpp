#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

void add_common(CLI::App* cmd, creditlab::CommonOptions& c) {
  cmd->add_option("-c,--config", c.config, "YAML run config")->required()->check(CLI::ExistingFile);
  cmd->add_option("--set", c.overrides, "override a config value, e.g. --set train.lr=0.001 (repeatable)");
  cmd->add_option("--seed", c.seed, "run seed (overrides config)");
  cmd->add_option("-o,--output", c.output_dir, "output directory (overrides config)");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace creditlab;
  CLI::App app{"creditlab: synthesized credit-assignment mixers for cooperative multi-agent Q-learning"};
  app.require_subcommand(1);

  SynthesizeOptions synth;
  auto* synth_cmd = app.add_subcommand("synthesize", "run the coder/evaluator pipeline and write a .tfcaf artifact");
  add_common(synth_cmd, synth.common);
  synth_cmd->add_option("--k", synth.k, "candidates per round");
  synth_cmd->add_option("--t", synth.t, "rounds");
  synth_cmd->add_option("--r", synth.r, "repair attempts per candidate");
  synth_cmd->add_option("--transcript", synth.transcript, "scripted provider transcript (JSON array of strings)");

  TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "train agents with the configured mixer");
  add_common(train_cmd, train.common);
  train_cmd->add_option("--steps", train.steps, "total environment steps");
  train_cmd->add_option("--artifact", train.artifact, "use this .tfcaf artifact as the mixer");
  train_cmd->add_flag("-q,--quiet", train.quiet, "no progress lines");

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "greedy evaluation of a checkpoint");
  add_common(eval_cmd, eval.common);
  eval_cmd->add_option("--checkpoint", eval.checkpoint, "checkpoint written by train");
  eval_cmd->add_option("--episodes", eval.episodes, "evaluation episodes")->check(CLI::PositiveNumber);
  eval_cmd->add_flag("--scripted", eval.scripted, "evaluate the hand-written foraging policy instead");

  CompareOptions cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "train several configs and compare parameters and learning speed");
  cmp_cmd->add_option("-c,--config", cmp.configs, "run configs (repeat)")->required()->check(CLI::ExistingFile);
  cmp_cmd->add_option("--set", cmp.overrides, "override applied to every config");
  cmp_cmd->add_option("--seed", cmp.seed, "seed applied to every config");
  cmp_cmd->add_option("-o,--output", cmp.output_dir, "output directory");
  cmp_cmd->add_option("--baseline", cmp.baseline, "index of the baseline config (default 0)");
  cmp_cmd->add_option("--threshold", cmp.threshold, "success rate threshold for steps-to-threshold");
  cmp_cmd->add_flag("--params-only", cmp.params_only, "only count learnable parameters");
  cmp_cmd->add_flag("-q,--quiet", cmp.quiet, "no progress lines");

  GradcheckOptions gc;
  auto* gc_cmd = app.add_subcommand("gradcheck", "compare network gradients against central differences");
  gc_cmd->add_option("--seed", gc.seed, "seed");
  gc_cmd->add_option("--trials", gc.trials, "number of random networks")->check(CLI::PositiveNumber);
  gc_cmd->add_option("--epsilon", gc.epsilon, "finite-difference step");
  gc_cmd->add_option("--tolerance", gc.tolerance, "maximum relative error");
  gc_cmd->add_flag("--inject-fault", gc.inject_fault, "corrupt one analytic gradient (the check must fail)");

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "least-squares fit of state-dependent linear mixers to exact joint Q");
  fit_cmd->add_option("--game", fit.game, "matrix game JSON")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--gamma", fit.gamma, "discount factor");
  fit_cmd->add_option("-o,--output", fit.output, "write the fit as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (*synth_cmd) return cmd_synthesize(synth, std::cout, std::cerr);
  if (*train_cmd) return cmd_train(train, std::cout, std::cerr);
  if (*eval_cmd) {
    if (!eval.scripted && eval.checkpoint.empty()) {
      std::cerr << "eval needs --checkpoint or --scripted\n";
      return kExitConfig;
    }
    return cmd_eval(eval, std::cout, std::cerr);
  }
  if (*cmp_cmd) return cmd_compare(cmp, std::cout, std::cerr);
  if (*gc_cmd) return cmd_gradcheck(gc, std::cout, std::cerr);
  if (*fit_cmd) return cmd_fit(fit, std::cout, std::cerr);
  return kExitConfig;
}
