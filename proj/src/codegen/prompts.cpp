#include "credit/codegen/prompts.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace credit::codegen {
namespace {

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw std::invalid_argument("cannot read prompt file " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void replace_all(std::string& text, const std::string& from, const std::string& to) {
  for (std::size_t pos = text.find(from); pos != std::string::npos; pos = text.find(from, pos + to.size()))
    text.replace(pos, from.size(), to);
}

}  // namespace

std::string substitute(std::string text, int n_agents, int state_dim) {
  replace_all(text, "{{n_agents}}", std::to_string(n_agents));
  replace_all(text, "{{state_dim}}", std::to_string(state_dim));
  return text;
}

PromptSet PromptSet::load(const std::filesystem::path& dir, const std::string& env_name, int n_agents,
                          int state_dim) {
  PromptSet p;
  p.coder_role = read_text(dir / "coder_role.txt");
  p.evaluator_role = read_text(dir / "evaluator_role.txt");
  p.task = substitute(read_text(dir / ("task_" + env_name + ".txt")), n_agents, state_dim);
  p.validate(n_agents, state_dim);
  return p;
}

void PromptSet::validate(int n_agents, int state_dim) const {
  if (task.find("{{") != std::string::npos) throw std::invalid_argument("task prompt has unsubstituted placeholders");
  if (task.find(std::to_string(n_agents)) == std::string::npos)
    throw std::invalid_argument("task prompt does not state n_agents=" + std::to_string(n_agents));
  if (task.find(std::to_string(state_dim)) == std::string::npos)
    throw std::invalid_argument("task prompt does not state state_dim=" + std::to_string(state_dim));
}

const std::string& dsl_reference() {
  static const std::string text = R"(Mixer language reference.

A program has exactly two lines (any order), plus optional '#' comments:
  weights: <expr>    # must have type Vector(n_agents)
  bias: <expr>       # must have type Scalar
The mixed value is q_tot = sum_i weights[i] * q_i + bias.

Expressions:
  number literals      1, 0.5, 2e-3
  s[i]                 scalar state component, 0 <= i < state_dim
  s[i:j]               vector of components i..j-1
  [e1, e2, ...]        vector literal; vector items are concatenated
  -e, e + e, e - e, e * e, e / e
  e < e, e <= e, e > e, e >= e, e == e   (1.0 when true, else 0.0)
Scalars broadcast against vectors; two vectors must have equal length.

Functions:
  abs sqrt exp log relu       elementwise
  softmax(v)                  vector -> vector, entries positive and sum to 1
  sum mean minv maxv          vector -> scalar
  clamp(x, lo, hi)            elementwise
  select(c, a, b)             a where c != 0, else b

Runtime rules (a violation on any reachable state rejects the program):
  division requires |denominator| >= 1e-9; log needs a positive argument;
  sqrt needs a non-negative argument; every intermediate must be finite.
Non-negative weights (softmax, relu, abs, exp at the root) keep greedy
per-agent actions consistent with the mixed value.
)";
  return text;
}

std::vector<ChatMessage> assemble_coder_messages(const PromptSet& prompts,
                                                 const std::optional<std::string>& previous_choice,
                                                 const std::optional<std::string>& error_feedback,
                                                 const std::optional<std::string>& nonce) {
  std::vector<ChatMessage> msgs;
  msgs.push_back({"system", prompts.coder_role});
  std::string user = prompts.task + "\n\n" + dsl_reference();
  if (previous_choice) {
    user += "\nThe program chosen in the previous round was:\n```tfcaf\n" + *previous_choice +
            "```\nPropose an improved program.\n";
  }
  if (error_feedback) user += "\n" + *error_feedback + "\n";
  user += "\nAnswer with exactly one fenced code block tagged tfcaf.\n";
  if (nonce) user += "Request id: " + *nonce + "\n";
  msgs.push_back({"user", std::move(user)});
  return msgs;
}

std::vector<ChatMessage> assemble_evaluator_messages(const PromptSet& prompts,
                                                     const std::vector<CandidateSummary>& candidates) {
  std::vector<ChatMessage> msgs;
  msgs.push_back({"system", prompts.evaluator_role});
  std::string user = prompts.task + "\n\nCandidates:\n";
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    user += "\n[" + std::to_string(i + 1) + "]\n```tfcaf\n" + candidates[i].source + "```\n";
    if (candidates[i].stats) user += "Probe statistics: " + *candidates[i].stats + "\n";
  }
  user += "\nReply with the number of the best candidate in square brackets, for example [1].\n";
  msgs.push_back({"user", std::move(user)});
  return msgs;
}

}  // namespace credit::codegen
