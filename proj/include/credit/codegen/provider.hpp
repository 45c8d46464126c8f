#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace credit::codegen {

struct ChatMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;
  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

class ProviderError : public std::runtime_error {
 public:
  explicit ProviderError(const std::string& what) : std::runtime_error("ProviderError: " + what) {}
};

enum class ProviderMode { Live, Scripted };

struct ProviderConfig {
  ProviderMode mode = ProviderMode::Scripted;
  std::string base_url;
  std::string model_id;
  std::string api_key_env_name = "OPENAI_API_KEY";
  double coder_temperature = 0.7;
  double evaluator_temperature = 0.0;
  std::chrono::milliseconds timeout{120'000};
  std::filesystem::path transcript_path;
  int max_retries = 3;
  std::chrono::milliseconds backoff_base{500};

  // Throws std::invalid_argument when a mode's requirements are not met.
  void validate() const;
};

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual std::string complete(const std::vector<ChatMessage>& messages, double temperature) = 0;
};

// Replays a transcript: a JSON array of response strings consumed in order.
class ScriptedProvider final : public ChatProvider {
 public:
  explicit ScriptedProvider(std::vector<std::string> responses) : responses_(std::move(responses)) {}
  static ScriptedProvider from_file(const std::filesystem::path& path);

  std::string complete(const std::vector<ChatMessage>& messages, double temperature) override;

  std::size_t consumed() const { return next_; }
  std::size_t size() const { return responses_.size(); }

 private:
  std::vector<std::string> responses_;
  std::size_t next_ = 0;
};

// OpenAI-compatible chat completions over HTTP(S):
//   POST {base_url}/chat/completions  {model, messages:[{role, content}], temperature}
//   -> {choices:[{message:{content}}]}
// Transport failures, timeouts and non-200 replies are retried max_retries
// times with exponential backoff (backoff_base * 2^attempt).
class HttpProvider final : public ChatProvider {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;
  explicit HttpProvider(ProviderConfig config, Sleeper sleeper = {});

  std::string complete(const std::vector<ChatMessage>& messages, double temperature) override;

  int attempts() const { return attempts_; }

 private:
  std::string attempt_once(const std::string& body, const std::string& key);

  ProviderConfig config_;
  Sleeper sleeper_;
  std::string scheme_host_port_;
  std::string path_prefix_;
  int attempts_ = 0;
};

std::unique_ptr<ChatProvider> make_provider(const ProviderConfig& config);

}  // namespace credit::codegen
