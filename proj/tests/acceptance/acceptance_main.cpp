// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only when
// every criterion passes. `credit_acceptance 3 5` runs a subset.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "credit/autodiff/mlp.hpp"
#include "credit/dsl/interpreter.hpp"
#include "credit/dsl/parser.hpp"
#include "credit/dsl/printer.hpp"
#include "credit/dsl/probe.hpp"
#include "credit/dsl/validate.hpp"
#include "credit/env/matrix_game.hpp"
#include "credit/mixers/igm.hpp"
#include "credit/mixers/mixer.hpp"
#include "credit/oracle/fit.hpp"
#include "credit/trainer/learner.hpp"
#include "credit/trainer/training.hpp"
#include "finite_diff.hpp"
#include "random_program.hpp"

namespace fs = std::filesystem;
using namespace credit;

namespace {

const fs::path kSource = CREDIT_SOURCE_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int prec = 3) {
  std::ostringstream s;
  s.precision(prec);
  s << v;
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("credit_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// 1. Round trip, probing and the division guard.
Outcome dsl_soundness() {
  const auto t0 = Clock::now();
  credit::testing::ProgramGenerator gen(2, 14, 1);
  int round_trips = 0;
  for (int i = 0; i < 200; ++i) {
    const auto p = gen.program(5);
    const auto text = dsl::pretty_print(p);
    const auto back = dsl::parse(text);
    if (dsl::structurally_equal(p, back) && dsl::pretty_print(back) == text) ++round_trips;
  }

  const dsl::LbfStateSampler sampler({8, 2, 2, true, 8, 50, 2});
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> wild(-10.0, 10.0);
  int probes = 0, finite = 0, typed = 0, untyped = 0, programs = 0;
  while (programs < 50) {
    auto p = gen.program(4);
    if (!dsl::validate(p, 2, 14).ok) continue;
    ++programs;
    auto states = dsl::boundary_states(14, 7.0);
    while (states.size() < 200)
      states.push_back(states.size() % 2 ? sampler.sample(rng)
                                         : Eigen::VectorXd(Eigen::VectorXd::NullaryExpr(14, [&] { return wild(rng); })));
    for (const auto& s : states) {
      ++probes;
      try {
        const auto wb = dsl::eval_weights_bias(p, s);
        if (wb.weights.allFinite() && std::isfinite(wb.bias)) ++finite;
        else ++untyped;
      } catch (const dsl::DslRuntimeError&) {
        ++typed;
      } catch (...) {
        ++untyped;
      }
    }
  }

  bool guard_fired = false;
  {
    auto p = dsl::parse(slurp(kSource / "fixtures/dsl/inverse_distance.txt"));
    if (dsl::validate(p, 2, 14).ok) {
      const auto rep = dsl::probe(p, sampler, 256, 0);
      for (const auto& f : rep.failures) guard_fired |= f.kind == "DivisionNearZero";
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = round_trips == 200 && probes == 10000 && untyped == 0 && guard_fired && secs < 30.0;
  return {ok, "round-trips " + std::to_string(round_trips) + "/200, probes " + std::to_string(probes) + " (" +
                  std::to_string(finite) + " finite, " + std::to_string(typed) + " typed errors, " +
                  std::to_string(untyped) + " other), DivisionNearZero " + (guard_fired ? "fired" : "missing") +
                  ", " + fmt(secs) + " s"};
}

// Smallest |pre-activation| of any hidden unit over the inputs.
double hidden_margin(const ad::MlpParams<double>& net, const Eigen::MatrixXd& x) {
  ad::MlpTape<double> tape;
  ad::mlp_forward_batch<double>(net, x, &tape);
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < tape.pre.size(); ++k) m = std::min(m, tape.pre[k].cwiseAbs().minCoeff());
  return m;
}

// 2. Reverse mode against central differences, agent net and full TD loss.
Outcome gradient_suite() {
  const auto t0 = Clock::now();
  constexpr double kEps = 1e-5;
  constexpr double kMargin = 1e-4;  // keep every ReLU away from its kink
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  int cases = 0, redraws = 0;
  const std::array dims{20, 64, 6};

  // 50 agent-network cases at the LBF size: gradient of c . Q(x).
  while (cases < 50) {
    const auto net = ad::MlpParams<double>::glorot(dims, rng);
    const Eigen::VectorXd x = Eigen::VectorXd::NullaryExpr(20, [&] { return u(rng); });
    const Eigen::VectorXd c = Eigen::VectorXd::NullaryExpr(6, [&] { return u(rng); });
    if (hidden_margin(net, x) < kMargin) {
      ++redraws;
      continue;
    }
    const auto g = ad::flatten(ad::mlp_backward<double>(net, x, c).params);
    auto v = ad::flatten(net);
    for (std::size_t j = 0; j < v.size(); ++j) {
      const double fd = credit::testing::central_difference(v, j, kEps, [&](const std::vector<double>& w) {
        auto copy = net;
        ad::unflatten(copy, std::span<const double>(w));
        return c.dot(ad::mlp_forward<double>(copy, x));
      });
      worst = std::max(worst, credit::testing::rel_error(g[j], fd));
    }
    ++cases;
  }

  // 50 end-to-end cases: TD loss through VDN, a TFCAF and the monotonic mixer.
  auto tfcaf_prog = dsl::parse(slurp(kSource / "fixtures/tfcaf/nearest_food_source.txt"));
  dsl::validate(tfcaf_prog, 2, 14);
  const auto tfcaf = mix::make_tfcaf(std::move(tfcaf_prog));
  const dsl::LbfStateSampler sampler({8, 2, 2, true, 8, 50, 2});
  std::uniform_int_distribution<int> act(0, 5);
  while (cases < 100) {
    const int kind = cases % 3;
    std::vector<train::Transition> items(8);
    Eigen::MatrixXd all_obs(20, 16);
    for (int b = 0; b < 8; ++b) {
      auto& t = items[b];
      t.state = sampler.sample(rng);
      t.next_state = sampler.sample(rng);
      t.obs = Eigen::MatrixXd::NullaryExpr(20, 2, [&] { return u(rng); });
      t.next_obs = Eigen::MatrixXd::NullaryExpr(20, 2, [&] { return u(rng); });
      t.actions = {act(rng), act(rng)};
      t.reward = u(rng);
      t.done = b == 0;
      all_obs.middleCols(2 * b, 2) = t.obs;
    }
    std::vector<const train::Transition*> batch;
    for (const auto& t : items) batch.push_back(&t);
    const auto net = ad::MlpParams<double>::glorot(dims, rng);
    if (hidden_margin(net, all_obs) < kMargin) {
      ++redraws;
      continue;
    }
    mix::MixerSpec mixer = mix::VdnSum{};
    if (kind == 1) mixer = tfcaf;
    if (kind == 2) mixer = mix::MonotonicHypernet<double>::init(2, 14, 32, 64, rng);
    const auto target_net = ad::MlpParams<double>::glorot(dims, rng);
    const auto y = train::td_targets(batch, target_net, mixer, 0.99);
    const auto g = ad::flatten(train::loss_and_gradients(batch, y, net, mixer).agent);
    auto v = ad::flatten(net);
    for (std::size_t j = 0; j < v.size(); ++j) {
      const double fd = credit::testing::central_difference(v, j, kEps, [&](const std::vector<double>& w) {
        auto copy = net;
        ad::unflatten(copy, std::span<const double>(w));
        return train::loss_and_gradients(batch, y, copy, mixer).loss;
      });
      worst = std::max(worst, credit::testing::rel_error(g[j], fd));
    }
    ++cases;
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-4 && secs < 60.0, std::to_string(cases) + " cases (" + std::to_string(redraws) +
                                           " redrawn near a ReLU kink), max rel error " + fmt(worst) + ", " +
                                           fmt(secs) + " s"};
}

train::TrainResult train_from(const fs::path& config, std::vector<std::string> overrides) {
  const auto cfg = creditlab::load_config(config, overrides);
  auto env = creditlab::make_env(cfg);
  return train::run_training(*env, creditlab::make_mixer(cfg, *env), cfg.train);
}

// 3. Unit-weight TFCAF and VDN give the same evaluations.
Outcome degenerate_equivalence() {
  const std::vector<std::string> o{"train.total_steps=20000", "seed=5"};
  const auto vdn = train_from(kSource / "configs/lbf_vdn.yaml", o);
  const auto ones = train_from(kSource / "configs/lbf_tfcaf_ones.yaml", o);
  int checkpoints = 0;
  double worst = 0.0;
  bool aligned = vdn.log.rows().size() == ones.log.rows().size();
  for (std::size_t i = 0; aligned && i < vdn.log.rows().size(); ++i) {
    const auto& a = vdn.log.rows()[i];
    const auto& b = ones.log.rows()[i];
    if (a.env_step != b.env_step || a.eval_mean_return.has_value() != b.eval_mean_return.has_value()) aligned = false;
    if (aligned && a.eval_mean_return) {
      ++checkpoints;
      worst = std::max(worst, std::abs(*a.eval_mean_return - *b.eval_mean_return));
    }
  }
  return {aligned && checkpoints > 0 && worst <= 1e-6,
          std::to_string(checkpoints) + " eval checkpoints, max |diff| " + fmt(worst)};
}

// 4. Non-negative weights preserve the per-agent argmax.
Outcome igm_brute_force() {
  credit::testing::ProgramGenerator gen(2, 14, 4);
  const dsl::LbfStateSampler sampler({8, 2, 2, true, 8, 50, 2});
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> acts(2, 6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int tried = 0, agreed = 0;
  while (tried < 100) {
    auto p = gen.nonnegative_program(3);
    if (!dsl::validate(p, 2, 14).ok) continue;
    const auto spec = mix::make_tfcaf(std::move(p));
    const Eigen::VectorXd s = sampler.sample(rng);
    Eigen::VectorXd w;
    try {
      w = mix::mix(spec, Eigen::Vector2d::Zero(), s).dq;
    } catch (const dsl::DslRuntimeError&) {
      continue;
    }
    if (w.minCoeff() <= 0.0) continue;  // zero weights tie every action
    const Eigen::VectorXd q0 = Eigen::VectorXd::NullaryExpr(acts(rng), [&] { return u(rng); });
    const Eigen::VectorXd q1 = Eigen::VectorXd::NullaryExpr(acts(rng), [&] { return u(rng); });
    ++tried;
    // Enumerate the joint space here rather than trusting igm_check alone:
    // the per-agent argmax tuple must attain the joint maximum.
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a < q0.size(); ++a)
      for (Eigen::Index b = 0; b < q1.size(); ++b)
        best = std::max(best, mix::mix(spec, Eigen::Vector2d(q0(a), q1(b)), s).q_tot);
    Eigen::Index i0, i1;
    q0.maxCoeff(&i0);
    q1.maxCoeff(&i1);
    const double greedy = mix::mix(spec, Eigen::Vector2d(q0(i0), q1(i1)), s).q_tot;
    if (greedy == best && mix::igm_check(spec, s, {q0, q1})) ++agreed;
  }
  auto neg = dsl::parse("weights: [1.0, -1.0]\nbias: 0.0");
  dsl::validate(neg, 2, 14);
  const bool neg_fails =
      !mix::igm_check(mix::make_tfcaf(std::move(neg)), Eigen::VectorXd::Zero(14), {Eigen::Vector2d(0, 1), Eigen::Vector2d(0, 1)});
  return {agreed == 100 && neg_fails, std::to_string(agreed) + "/100 agree; negative-weight case " +
                                          (neg_fails ? "fails as expected" : "unexpectedly passes")};
}

// 5. Scripted synthesis replays byte for byte.
Outcome pipeline_replay() {
  const auto dir = scratch("synth");
  std::ostringstream out, err;
  creditlab::SynthesizeOptions o;
  o.common.config = kSource / "configs/synth_lbf_scripted.yaml";
  o.common.output_dir = dir / "a";
  const int rc_a = creditlab::cmd_synthesize(o, out, err);
  o.common.output_dir = dir / "b";
  const int rc_b = creditlab::cmd_synthesize(o, out, err);
  if (rc_a != 0 || rc_b != 0) return {false, "synthesize failed: " + err.str()};
  const bool identical = slurp(dir / "a/lbf_scripted.tfcaf") == slurp(dir / "b/lbf_scripted.tfcaf") &&
                         slurp(dir / "a/lbf_scripted.manifest.json") == slurp(dir / "b/lbf_scripted.manifest.json");
  const auto m = nlohmann::json::parse(slurp(dir / "a/lbf_scripted.manifest.json"));
  const auto selections = m["selections"].size();
  int repaired = 0;
  for (const auto& c : m["candidates"]) repaired += !c["repair_history"].empty();

  o.common.output_dir = dir / "single";
  o.k = 1;
  o.t = 1;
  o.transcript = kSource / "fixtures/transcripts/lbf_k1_t1.json";
  const int rc_single = creditlab::cmd_synthesize(o, out, err);
  int evaluator_calls = -1;
  if (rc_single == 0) {
    const auto s = nlohmann::json::parse(slurp(dir / "single/lbf_scripted.manifest.json"));
    evaluator_calls = 0;
    for (const auto& c : s["provider_calls"]) evaluator_calls += c["role"] == "evaluator";
  }
  const bool ok = identical && selections == 3 && repaired == 1 && rc_single == 0 && evaluator_calls == 0;
  return {ok, std::string(identical ? "byte-identical" : "artifacts differ") + ", " + std::to_string(selections) +
                  " selections, " + std::to_string(repaired) + " repaired candidate(s), K=1/T=1 evaluator calls " +
                  std::to_string(evaluator_calls)};
}

// 6. Parameter counts on the 8x8 foraging task.
Outcome parameter_count() {
  const auto dir = scratch("params");
  std::ostringstream out, err;
  creditlab::CompareOptions o;
  o.configs = {kSource / "configs/lbf_monotonic.yaml", kSource / "configs/lbf_tfcaf_nearest_food.yaml"};
  o.output_dir = dir;
  o.params_only = true;
  if (creditlab::cmd_compare(o, out, err) != 0) return {false, err.str()};
  const auto j = nlohmann::json::parse(slurp(dir / "compare.json"));
  const long mono = j["runs"][0]["total_params"];
  const long tf = j["runs"][1]["total_params"];
  const double red = j["runs"][1]["reduction_vs_baseline"];
  return {tf < mono, "monotonic " + std::to_string(mono) + " vs tfcaf " + std::to_string(tf) + " parameters, reduction " +
                         fmt(100.0 * red, 4) + "%"};
}

// 7. Learning speed on 8x8-2p-2f-coop, three seeds.
Outcome learning_speed() {
  const std::int64_t budget = 200'000;
  std::vector<double> tf_steps, mono_steps;
  std::string detail;
  bool all_reached = true;
  double slowest = 0.0;
  for (std::uint64_t seed : {0, 1, 2}) {
    const std::vector<std::string> o{"seed=" + std::to_string(seed), "train.total_steps=" + std::to_string(budget),
                                     "train.stop_at_success=0.9"};
    const auto t0 = Clock::now();
    const auto tf = train_from(kSource / "configs/lbf_tfcaf_nearest_food.yaml", o);
    slowest = std::max(slowest, seconds_since(t0));
    const auto t1 = Clock::now();
    const auto mono = train_from(kSource / "configs/lbf_monotonic.yaml", o);
    slowest = std::max(slowest, seconds_since(t1));
    // An unreached threshold counts as slower than any reached one.
    const double inf = std::numeric_limits<double>::infinity();
    tf_steps.push_back(tf.threshold_step ? static_cast<double>(*tf.threshold_step) : inf);
    mono_steps.push_back(mono.threshold_step ? static_cast<double>(*mono.threshold_step) : inf);
    all_reached &= tf.threshold_step.has_value();
    auto show = [](const train::TrainResult& r) {
      if (r.threshold_step) return std::to_string(*r.threshold_step);
      double best = 0.0;
      for (const auto& row : r.log.rows())
        if (row.eval_success_rate) best = std::max(best, *row.eval_success_rate);
      return std::string("not reached (best success ") + fmt(best, 2) + ")";
    };
    detail += "seed " + std::to_string(seed) + ": tfcaf " + show(tf) + ", monotonic " + show(mono) + "; ";
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  const double tf_med = median(tf_steps), mono_med = median(mono_steps);
  const bool ok = all_reached && tf_med <= mono_med && slowest <= 20 * 60;
  return {ok, detail + "median tfcaf " + fmt(tf_med, 7) + " vs monotonic " + fmt(mono_med, 7) + ", slowest run " +
                  fmt(slowest) + " s"};
}

// 8. Per-state versus constant weights on the constructed games.
Outcome representability() {
  auto load = [](const std::string& name) {
    std::ifstream in(kSource / "fixtures/games" / name);
    return env::MatrixGame::from_json(nlohmann::json::parse(in));
  };
  const auto two = oracle::representability_fit(load("two_state.json"), 0.5);
  const auto add = oracle::representability_fit(load("additive.json"), 0.5);
  const bool ok = two.residual_rms < 1e-8 && two.constant_weight_residual_rms > 0.1 && add.residual_rms < 1e-9 &&
                  add.constant_weight_residual_rms < 1e-9;
  return {ok, "two-state per-state " + fmt(two.residual_rms) + " / constant " + fmt(two.constant_weight_residual_rms) +
                  "; additive per-state " + fmt(add.residual_rms) + " / constant " +
                  fmt(add.constant_weight_residual_rms)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"dsl soundness", dsl_soundness},
      {"gradient suite", gradient_suite},
      {"unit-weight TFCAF equals VDN", degenerate_equivalence},
      {"IGM brute force", igm_brute_force},
      {"pipeline replay", pipeline_replay},
      {"parameter count", parameter_count},
      {"learning speed", learning_speed},
      {"representability", representability},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    failed += !r.pass;
    std::printf("[%s] criterion %d %s: %s\n", r.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                r.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
