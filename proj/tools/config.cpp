#include "config.hpp"

#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "credit/common/digest.hpp"
#include "credit/dsl/tfcaf_file.hpp"

namespace creditlab {
namespace {

using credit::codegen::ProviderMode;

void set_path(YAML::Node node, const std::vector<std::string>& keys, std::size_t i, const YAML::Node& value) {
  if (i + 1 == keys.size()) {
    node[keys[i]] = value;
    return;
  }
  if (!node[keys[i]] || node[keys[i]].IsNull()) node[keys[i]] = YAML::Node(YAML::NodeType::Map);
  if (!node[keys[i]].IsMap()) throw ConfigError("override path crosses a non-map key: " + keys[i]);
  set_path(node[keys[i]], keys, i + 1, value);
}

void apply_override(YAML::Node root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key.path=value: " + assignment);
  std::vector<std::string> keys;
  std::stringstream ss(assignment.substr(0, eq));
  for (std::string k; std::getline(ss, k, '.');) {
    if (k.empty()) throw ConfigError("empty key in override: " + assignment);
    keys.push_back(k);
  }
  set_path(root, keys, 0, YAML::Load(assignment.substr(eq + 1)));
}

template <class T>
void read(const YAML::Node& node, const char* key, T& out) {
  if (!node || !node[key]) return;
  try {
    out = node[key].as<T>();
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void read_path(const YAML::Node& node, const char* key, fs::path& out, const fs::path& base) {
  std::string s;
  read(node, key, s);
  if (s.empty()) return;
  fs::path p(s);
  out = p.is_absolute() || base.empty() ? p : base / p;
}

void check_known(const YAML::Node& node, const std::string& where, std::initializer_list<const char*> keys) {
  if (!node || node.IsNull()) return;
  if (!node.IsMap()) throw ConfigError(where + " must be a mapping");
  for (const auto& kv : node) {
    const auto k = kv.first.as<std::string>();
    bool known = false;
    for (const char* allowed : keys) known = known || k == allowed;
    if (!known) throw ConfigError("unknown config key '" + (where.empty() ? k : where + "." + k) + "'");
  }
}

}  // namespace

RunConfig parse_config(const std::string& yaml_text, const fs::path& base_dir,
                       const std::vector<std::string>& overrides) {
  YAML::Node root;
  try {
    root = yaml_text.empty() ? YAML::Node(YAML::NodeType::Map) : YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  for (const auto& o : overrides) apply_override(root, o);
  check_known(root, "", {"seed", "output_dir", "name", "env", "mixer", "train", "synth"});

  RunConfig c;
  read(root, "seed", c.seed);
  read_path(root, "output_dir", c.output_dir, base_dir);
  if (!root["output_dir"]) c.output_dir = base_dir.empty() ? c.output_dir : base_dir / c.output_dir;
  read(root, "name", c.name);

  const auto env = root["env"];
  check_known(env, "env", {"kind", "grid_size", "n_agents", "n_foods", "coop", "sight_radius", "max_steps",
                           "level_max", "game", "horizon"});
  read(env, "kind", c.env.kind);
  read(env, "grid_size", c.env.lbf.grid_size);
  read(env, "n_agents", c.env.lbf.n_agents);
  read(env, "n_foods", c.env.lbf.n_foods);
  read(env, "coop", c.env.lbf.coop);
  read(env, "sight_radius", c.env.lbf.sight_radius);
  read(env, "max_steps", c.env.lbf.max_steps);
  read(env, "level_max", c.env.lbf.level_max);
  read_path(env, "game", c.env.game, base_dir);
  read(env, "horizon", c.env.horizon);
  if (c.env.kind != "lbf" && c.env.kind != "matrix") throw ConfigError("env.kind must be lbf or matrix");
  if (c.env.kind == "matrix" && !fs::exists(c.env.game))
    throw ConfigError("env.game file not found: " + c.env.game.string());

  const auto mixer = root["mixer"];
  check_known(mixer, "mixer", {"kind", "artifact", "embed_dim", "hypernet_hidden"});
  read(mixer, "kind", c.mixer.kind);
  read_path(mixer, "artifact", c.mixer.artifact, base_dir);
  read(mixer, "embed_dim", c.mixer.embed_dim);
  read(mixer, "hypernet_hidden", c.mixer.hypernet_hidden);
  if (c.mixer.kind != "vdn" && c.mixer.kind != "monotonic" && c.mixer.kind != "tfcaf")
    throw ConfigError("mixer.kind must be vdn, monotonic or tfcaf");
  if (c.mixer.kind == "tfcaf" && !fs::exists(c.mixer.artifact))
    throw ConfigError("mixer.artifact file not found: " + c.mixer.artifact.string());

  auto& t = c.train;
  const auto train = root["train"];
  check_known(train, "train", {"gamma", "batch_size", "buffer_capacity", "lr", "target_update_interval",
                               "epsilon_start", "epsilon_end", "epsilon_anneal_steps", "total_steps", "warmup_steps",
                               "eval_interval", "eval_episodes", "log_interval", "hidden", "grad_clip",
                               "normalize_returns", "stop_at_success"});
  read(train, "gamma", t.gamma);
  read(train, "batch_size", t.batch_size);
  read(train, "buffer_capacity", t.buffer_capacity);
  read(train, "lr", t.lr);
  read(train, "target_update_interval", t.target_update_interval);
  read(train, "epsilon_start", t.epsilon.start);
  read(train, "epsilon_end", t.epsilon.end);
  read(train, "epsilon_anneal_steps", t.epsilon.anneal_steps);
  read(train, "total_steps", t.total_steps);
  read(train, "warmup_steps", t.warmup_steps);
  read(train, "eval_interval", t.eval_interval);
  read(train, "eval_episodes", t.eval_episodes);
  read(train, "log_interval", t.log_interval);
  read(train, "hidden", t.hidden);
  read(train, "grad_clip", t.grad_clip);
  read(train, "normalize_returns", t.normalize_returns);
  read(train, "stop_at_success", t.stop_at_success);
  t.seed = c.seed;

  const auto synth = root["synth"];
  check_known(synth, "synth", {"name", "task", "prompts_dir", "k", "t", "r", "n_probes", "final_probes",
                               "evaluator_sees_stats", "provider"});
  auto& s = c.synth;
  read(synth, "name", s.name);
  read(synth, "task", s.task);
  read_path(synth, "prompts_dir", s.prompts_dir, base_dir);
  if (!synth || !synth["prompts_dir"]) s.prompts_dir = base_dir.empty() ? s.prompts_dir : base_dir / s.prompts_dir;
  read(synth, "k", s.synthesis.k);
  read(synth, "t", s.synthesis.t);
  read(synth, "r", s.synthesis.r);
  read(synth, "n_probes", s.synthesis.n_probes);
  read(synth, "final_probes", s.synthesis.final_probes);
  read(synth, "evaluator_sees_stats", s.synthesis.evaluator_sees_stats);
  s.synthesis.seed = c.seed;

  const auto provider = synth ? synth["provider"] : YAML::Node();
  check_known(provider, "synth.provider", {"mode", "transcript", "base_url", "model", "api_key_env",
                                           "coder_temperature", "evaluator_temperature", "timeout_ms",
                                           "max_retries"});
  std::string mode = "scripted";
  read(provider, "mode", mode);
  if (mode != "scripted" && mode != "live") throw ConfigError("synth.provider.mode must be scripted or live");
  s.provider.mode = mode == "live" ? ProviderMode::Live : ProviderMode::Scripted;
  read_path(provider, "transcript", s.provider.transcript_path, base_dir);
  read(provider, "base_url", s.provider.base_url);
  read(provider, "model", s.provider.model_id);
  read(provider, "api_key_env", s.provider.api_key_env_name);
  read(provider, "coder_temperature", s.provider.coder_temperature);
  read(provider, "evaluator_temperature", s.provider.evaluator_temperature);
  std::int64_t timeout_ms = s.provider.timeout.count();
  read(provider, "timeout_ms", timeout_ms);
  s.provider.timeout = std::chrono::milliseconds(timeout_ms);
  read(provider, "max_retries", s.provider.max_retries);
  s.synthesis.coder_temperature = s.provider.coder_temperature;
  s.synthesis.evaluator_temperature = s.provider.evaluator_temperature;

  try {
    c.env.lbf.validate();
    c.train.validate();
    s.synthesis.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

RunConfig load_config(const fs::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  auto cfg = parse_config(ss.str(), path.parent_path(), overrides);
  cfg.source_path = path;
  return cfg;
}

nlohmann::json RunConfig::to_json() const {
  const auto& t = train;
  const auto& s = synth;
  return {{"seed", seed},
          {"output_dir", output_dir.string()},
          {"name", name},
          {"env",
           {{"kind", env.kind},
            {"grid_size", env.lbf.grid_size},
            {"n_agents", env.lbf.n_agents},
            {"n_foods", env.lbf.n_foods},
            {"coop", env.lbf.coop},
            {"sight_radius", env.lbf.sight_radius},
            {"max_steps", env.lbf.max_steps},
            {"level_max", env.lbf.level_max},
            {"game", env.game.string()},
            {"horizon", env.horizon}}},
          {"mixer",
           {{"kind", mixer.kind},
            {"artifact", mixer.artifact.string()},
            {"embed_dim", mixer.embed_dim},
            {"hypernet_hidden", mixer.hypernet_hidden}}},
          {"train",
           {{"gamma", t.gamma},
            {"batch_size", t.batch_size},
            {"buffer_capacity", t.buffer_capacity},
            {"lr", t.lr},
            {"target_update_interval", t.target_update_interval},
            {"epsilon_start", t.epsilon.start},
            {"epsilon_end", t.epsilon.end},
            {"epsilon_anneal_steps", t.epsilon.anneal_steps},
            {"total_steps", t.total_steps},
            {"warmup_steps", t.warmup_steps},
            {"eval_interval", t.eval_interval},
            {"eval_episodes", t.eval_episodes},
            {"log_interval", t.log_interval},
            {"hidden", t.hidden},
            {"grad_clip", t.grad_clip},
            {"normalize_returns", t.normalize_returns},
            {"stop_at_success", t.stop_at_success}}},
          {"synth",
           {{"name", s.name},
            {"task", s.task},
            {"prompts_dir", s.prompts_dir.string()},
            {"k", s.synthesis.k},
            {"t", s.synthesis.t},
            {"r", s.synthesis.r},
            {"n_probes", s.synthesis.n_probes},
            {"final_probes", s.synthesis.final_probes},
            {"evaluator_sees_stats", s.synthesis.evaluator_sees_stats},
            {"provider",
             {{"mode", s.provider.mode == ProviderMode::Live ? "live" : "scripted"},
              {"transcript", s.provider.transcript_path.string()},
              {"base_url", s.provider.base_url},
              {"model", s.provider.model_id},
              {"api_key_env", s.provider.api_key_env_name},
              {"coder_temperature", s.provider.coder_temperature},
              {"evaluator_temperature", s.provider.evaluator_temperature},
              {"timeout_ms", s.provider.timeout.count()},
              {"max_retries", s.provider.max_retries}}}}}};
}

std::unique_ptr<credit::env::MultiAgentEnv> make_env(const RunConfig& cfg) {
  if (cfg.env.kind == "lbf") return std::make_unique<credit::env::LbfTask>(cfg.env.lbf);
  std::ifstream in(cfg.env.game);
  if (!in) throw ConfigError("cannot read game file " + cfg.env.game.string());
  auto game = credit::env::MatrixGame::from_json(nlohmann::json::parse(in));
  return std::make_unique<credit::env::MatrixTask>(std::move(game), cfg.env.horizon);
}

credit::mix::MixerSpec make_mixer(const RunConfig& cfg, const credit::env::MultiAgentEnv& env) {
  if (cfg.mixer.kind == "vdn") return credit::mix::VdnSum{};
  if (cfg.mixer.kind == "monotonic") {
    std::mt19937_64 rng(cfg.seed * 0x9e3779b97f4a7c15ULL + 17);
    return credit::mix::MonotonicHypernet<double>::init(env.n_agents(), env.state_dim(), cfg.mixer.embed_dim,
                                                        cfg.mixer.hypernet_hidden, rng);
  }
  try {
    return credit::mix::make_tfcaf(
        credit::dsl::load_tfcaf_program(cfg.mixer.artifact, env.n_agents(), env.state_dim()));
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

std::string file_digest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "missing";
  std::ostringstream ss;
  ss << in.rdbuf();
  return credit::sha256_hex(ss.str());
}

}  // namespace creditlab
