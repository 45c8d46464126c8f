#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "credit/codegen/pipeline.hpp"
#include "credit/codegen/provider.hpp"
#include "credit/env/lbf.hpp"
#include "credit/env/multi_agent_env.hpp"
#include "credit/mixers/mixer.hpp"
#include "credit/trainer/training.hpp"

namespace creditlab {

namespace fs = std::filesystem;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EnvBlock {
  std::string kind = "lbf";  // lbf | matrix
  credit::env::LbfConfig lbf;
  fs::path game;             // matrix only
  int horizon = 10;          // matrix only
};

struct MixerBlock {
  std::string kind = "vdn";  // vdn | monotonic | tfcaf
  fs::path artifact;         // tfcaf only
  int embed_dim = 32;
  int hypernet_hidden = 64;
};

struct SynthBlock {
  std::string name = "tfcaf";
  std::string task = "lbf";  // selects prompts/task_<task>.txt
  fs::path prompts_dir = "prompts";
  credit::codegen::SynthesisConfig synthesis;
  credit::codegen::ProviderConfig provider;
};

// Effective configuration after defaults, file values and overrides, in that
// order of precedence (later wins). Relative paths resolve against the
// directory of the config file.
struct RunConfig {
  std::uint64_t seed = 0;
  fs::path output_dir = "runs";
  std::string name = "run";
  EnvBlock env;
  MixerBlock mixer;
  credit::train::TrainConfig train;
  SynthBlock synth;
  fs::path source_path;  // config file, empty when built in code

  nlohmann::json to_json() const;
};

// Loads a YAML file and applies `key.path=value` overrides before decoding.
RunConfig load_config(const fs::path& path, const std::vector<std::string>& overrides = {});
RunConfig parse_config(const std::string& yaml_text, const fs::path& base_dir,
                       const std::vector<std::string>& overrides = {});

// Builds the environment described by the config.
std::unique_ptr<credit::env::MultiAgentEnv> make_env(const RunConfig& cfg);

// Builds the mixer, checking a TFCAF artifact's bound dims against the env.
credit::mix::MixerSpec make_mixer(const RunConfig& cfg, const credit::env::MultiAgentEnv& env);

// sha256 of a file's bytes, or "missing".
std::string file_digest(const fs::path& path);

}  // namespace creditlab
