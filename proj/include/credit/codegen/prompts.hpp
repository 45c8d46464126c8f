#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "credit/codegen/provider.hpp"

namespace credit::codegen {

// Role and task prompts for one environment. The task prompt is a template:
// {{n_agents}} and {{state_dim}} are substituted at load time.
struct PromptSet {
  std::string coder_role;
  std::string evaluator_role;
  std::string task;

  // Reads <dir>/coder_role.txt, <dir>/evaluator_role.txt and
  // <dir>/task_<env_name>.txt.
  static PromptSet load(const std::filesystem::path& dir, const std::string& env_name, int n_agents, int state_dim);

  // Throws std::invalid_argument unless the task text states both figures.
  void validate(int n_agents, int state_dim) const;
};

std::string substitute(std::string text, int n_agents, int state_dim);

// Text describing the mixer language, included in every coder request.
const std::string& dsl_reference();

std::vector<ChatMessage> assemble_coder_messages(const PromptSet& prompts,
                                                 const std::optional<std::string>& previous_choice,
                                                 const std::optional<std::string>& error_feedback,
                                                 const std::optional<std::string>& nonce = std::nullopt);

struct CandidateSummary {
  std::string source;
  std::optional<std::string> stats;  // probe statistics, when enabled
};

std::vector<ChatMessage> assemble_evaluator_messages(const PromptSet& prompts,
                                                     const std::vector<CandidateSummary>& candidates);

}  // namespace credit::codegen
