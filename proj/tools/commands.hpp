#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace creditlab {

namespace fs = std::filesystem;

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitNoViableCandidate = 3,
  kExitProviderError = 4,
  kExitCheckFailed = 5,
};

struct CommonOptions {
  fs::path config;
  std::vector<std::string> overrides;  // key.path=value, applied after the file
  std::optional<std::uint64_t> seed;
  std::optional<fs::path> output_dir;
};

struct SynthesizeOptions {
  CommonOptions common;
  std::optional<int> k, t, r;
  std::optional<fs::path> transcript;
};

struct TrainOptions {
  CommonOptions common;
  std::optional<std::int64_t> steps;
  std::optional<fs::path> artifact;
  bool quiet = false;
};

struct EvalOptions {
  CommonOptions common;
  fs::path checkpoint;
  int episodes = 100;
  bool scripted = false;  // hand-written foraging policy instead of a checkpoint
};

struct CompareOptions {
  std::vector<fs::path> configs;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  fs::path output_dir = "runs/compare";
  std::size_t baseline = 0;
  double threshold = 0.9;
  bool params_only = false;
  bool quiet = false;
};

struct GradcheckOptions {
  std::uint64_t seed = 0;
  int trials = 10;
  double epsilon = 1e-5;
  double tolerance = 1e-4;
  bool inject_fault = false;
};

struct FitOptions {
  fs::path game;
  double gamma = 0.5;
  std::optional<fs::path> output;
};

int cmd_synthesize(const SynthesizeOptions& opts, std::ostream& out, std::ostream& err);
int cmd_train(const TrainOptions& opts, std::ostream& out, std::ostream& err);
int cmd_eval(const EvalOptions& opts, std::ostream& out, std::ostream& err);
int cmd_compare(const CompareOptions& opts, std::ostream& out, std::ostream& err);
int cmd_gradcheck(const GradcheckOptions& opts, std::ostream& out, std::ostream& err);
int cmd_fit(const FitOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace creditlab
