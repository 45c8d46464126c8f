#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "credit/codegen/prompts.hpp"
#include "credit/codegen/provider.hpp"
#include "credit/dsl/ast.hpp"
#include "credit/dsl/probe.hpp"
#include "credit/dsl/validate.hpp"

namespace credit::codegen {

class CodeBlockError : public std::runtime_error {
 public:
  enum class Kind { NoCodeBlock, MultipleCodeBlocks };
  CodeBlockError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Returns the body of the single fenced block tagged `tfcaf`.
std::string extract_code_block(const std::string& response);

struct RepairAttempt {
  std::string error_text;  // feedback sent with the request
  std::string raw_response;
  std::string outcome;     // "clean" or the new error text
};

struct CandidateRecord {
  int round = 0;
  int index = 0;  // 1-based within the round
  std::string raw_response;
  std::optional<std::string> source;           // extracted block
  std::optional<std::string> canonical_source; // pretty-printed, when it parses
  std::optional<dsl::ValidationReport> validation;
  std::optional<dsl::ProbeReport> probe;
  std::vector<RepairAttempt> repair_history;
  std::string error_text;  // empty when clean
  bool dropped = false;

  bool clean() const { return error_text.empty() && !dropped; }
};

struct ProviderCall {
  int round = 0;
  std::string role;     // coder | evaluator
  std::string purpose;  // generate | repair | select | reselect
  int candidate = 0;    // 0 for evaluator calls
  double temperature = 0.0;
  std::string request_digest;
  std::string response;
};

struct SelectionEvent {
  int round = 0;
  std::vector<int> candidate_indices;  // clean candidates shown, in order
  int chosen = 1;                      // 1-based position in candidate_indices
  int evaluator_calls = 0;
  bool fallback = false;
  std::string warning;
};

struct SynthesisConfig {
  int k = 3;
  int t = 3;
  int r = 3;
  std::uint64_t seed = 0;
  int n_probes = 256;
  int final_probes = 1024;
  bool evaluator_sees_stats = true;
  double coder_temperature = 0.7;
  double evaluator_temperature = 0.0;

  void validate() const;
};

struct SynthesisArtifact {
  std::string final_source;
  std::string digest;
  dsl::Binding binding;
  SynthesisConfig config;
  std::vector<CandidateRecord> candidates;
  std::vector<SelectionEvent> selections;
  std::vector<ProviderCall> calls;
  dsl::ProbeReport final_probe;
  std::vector<std::string> warnings;
};

class RepairBudgetExhausted : public std::runtime_error {
 public:
  RepairBudgetExhausted(CandidateRecord record, const std::string& what)
      : std::runtime_error(what), record_(std::move(record)) {}
  const CandidateRecord& record() const { return record_; }

 private:
  CandidateRecord record_;
};

class NoViableCandidate : public std::runtime_error {
 public:
  NoViableCandidate(int round, const std::string& what) : std::runtime_error(what), round_(round) {}
  int round() const { return round_; }

 private:
  int round_;
};

// One synthesis run: K candidates per round, repair of failing candidates,
// evaluator selection, T rounds. Provider calls are issued sequentially and
// logged, so a scripted provider reproduces a run exactly.
class SynthesisSession {
 public:
  SynthesisSession(ChatProvider& provider, PromptSet prompts, const dsl::StateSampler& sampler, int n_agents,
                   SynthesisConfig config);

  std::vector<CandidateRecord> generate_candidates(int round, const std::optional<std::string>& previous_choice);
  // Re-requests a failing candidate up to config.r times; throws
  // RepairBudgetExhausted with the full history when none comes back clean.
  CandidateRecord repair_candidate(CandidateRecord record);
  // Returns a 1-based position into `clean`. No call is made for one candidate.
  SelectionEvent select_candidate(int round, const std::vector<CandidateRecord>& clean);

  SynthesisArtifact run();

  // Parses, validates and probes the response held by `record`, filling in
  // its diagnostics.
  void diagnose(CandidateRecord& record) const;

  const std::vector<ProviderCall>& calls() const { return calls_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  std::string call(const std::vector<ChatMessage>& messages, double temperature, int round, const std::string& role,
                   const std::string& purpose, int candidate);
  std::uint64_t probe_seed(int round, int index, int attempt) const;

  ChatProvider& provider_;
  PromptSet prompts_;
  const dsl::StateSampler& sampler_;
  int n_agents_;
  SynthesisConfig config_;
  std::vector<ProviderCall> calls_;
  std::vector<std::string> warnings_;
  std::vector<CandidateRecord> history_;
};

std::optional<int> parse_selection(const std::string& response, int n_candidates);

}  // namespace credit::codegen
