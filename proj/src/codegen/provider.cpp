#include "credit/codegen/provider.hpp"

#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace credit::codegen {

void ProviderConfig::validate() const {
  if (mode == ProviderMode::Scripted) {
    if (transcript_path.empty()) throw std::invalid_argument("scripted provider requires a transcript path");
    if (!std::filesystem::exists(transcript_path))
      throw std::invalid_argument("transcript file not found: " + transcript_path.string());
  } else {
    if (base_url.empty()) throw std::invalid_argument("live provider requires base_url");
    if (api_key_env_name.empty()) throw std::invalid_argument("live provider requires api_key_env_name");
    if (model_id.empty()) throw std::invalid_argument("live provider requires model_id");
  }
  if (coder_temperature < 0.0 || evaluator_temperature < 0.0)
    throw std::invalid_argument("temperatures must be >= 0");
  if (max_retries < 0) throw std::invalid_argument("max_retries must be >= 0");
}

ScriptedProvider ScriptedProvider::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open transcript " + path.string());
  const auto j = nlohmann::json::parse(in);
  if (!j.is_array()) throw std::invalid_argument("transcript must be a JSON array of strings");
  return ScriptedProvider(j.get<std::vector<std::string>>());
}

std::string ScriptedProvider::complete(const std::vector<ChatMessage>&, double) {
  if (next_ >= responses_.size())
    throw ProviderError("scripted transcript exhausted after " + std::to_string(responses_.size()) + " responses");
  return responses_[next_++];
}

HttpProvider::HttpProvider(ProviderConfig config, Sleeper sleeper)
    : config_(std::move(config)), sleeper_(std::move(sleeper)) {
  if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  const std::string& url = config_.base_url;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw std::invalid_argument("base_url must include a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  scheme_host_port_ = url.substr(0, path_start);
  path_prefix_ = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

std::string HttpProvider::attempt_once(const std::string& body, const std::string& key) {
  ++attempts_;
  httplib::Client client(scheme_host_port_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  httplib::Headers headers{{"Authorization", "Bearer " + key}};
  auto res = client.Post(path_prefix_ + "/chat/completions", headers, body, "application/json");
  if (!res) throw ProviderError("transport failure: " + httplib::to_string(res.error()));
  if (res->status != 200) throw ProviderError("HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
  try {
    const auto reply = nlohmann::json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(std::string("malformed completion body: ") + e.what());
  }
}

std::string HttpProvider::complete(const std::vector<ChatMessage>& messages, double temperature) {
  const char* key = std::getenv(config_.api_key_env_name.c_str());
  if (!key) throw ProviderError("environment variable " + config_.api_key_env_name + " is not set");

  nlohmann::json body;
  body["model"] = config_.model_id;
  body["temperature"] = temperature;
  auto msgs = nlohmann::json::array();
  for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  body["messages"] = msgs;
  const std::string payload = body.dump();

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) sleeper_(config_.backoff_base * (1LL << (attempt - 1)));
    try {
      return attempt_once(payload, key);
    } catch (const ProviderError& e) {
      last_error = e.what();
    }
  }
  throw ProviderError("giving up after " + std::to_string(config_.max_retries) + " retries: " + last_error);
}

std::unique_ptr<ChatProvider> make_provider(const ProviderConfig& config) {
  config.validate();
  if (config.mode == ProviderMode::Scripted)
    return std::make_unique<ScriptedProvider>(ScriptedProvider::from_file(config.transcript_path));
  return std::make_unique<HttpProvider>(config);
}

}  // namespace credit::codegen
