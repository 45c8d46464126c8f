#include "credit/codegen/pipeline.hpp"

#include <regex>
#include <sstream>

#include "credit/common/digest.hpp"
#include "credit/dsl/parser.hpp"
#include "credit/dsl/printer.hpp"

namespace credit::codegen {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string hex64(std::uint64_t v) {
  std::ostringstream ss;
  ss << std::hex << v;
  return ss.str();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string probe_stats(const dsl::ProbeReport& report) {
  std::ostringstream ss;
  ss << "weights over " << report.n_probes << " states:";
  for (std::size_t i = 0; i < report.weight_stats.size(); ++i) {
    const auto& w = report.weight_stats[i];
    ss << " agent" << i << " min=" << dsl::format_number(w.min) << " max=" << dsl::format_number(w.max)
       << " mean=" << dsl::format_number(w.mean) << ";";
  }
  if (report.negative_weight_seen) ss << " negative weights observed";
  return ss.str();
}

std::string feedback_for(const CandidateRecord& record) {
  std::string text = "Your previous answer was rejected.\n";
  if (record.source) text += "Program:\n```tfcaf\n" + *record.source + (record.source->ends_with('\n') ? "" : "\n") + "```\n";
  text += "Error:\n" + record.error_text + "\nReturn a corrected program.";
  return text;
}

}  // namespace

std::string extract_code_block(const std::string& response) {
  std::istringstream in(response);
  std::string line;
  std::vector<std::string> blocks;
  bool inside = false;
  bool tagged = false;
  std::string body;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (!inside) {
      if (t.starts_with("```")) {
        inside = true;
        tagged = trim(t.substr(3)) == "tfcaf";
        body.clear();
      }
    } else if (t == "```") {
      if (tagged) blocks.push_back(body);
      inside = false;
    } else {
      body += line;
      body += '\n';
    }
  }
  if (blocks.empty())
    throw CodeBlockError(CodeBlockError::Kind::NoCodeBlock, "NoCodeBlock: response contains no ```tfcaf fenced block");
  if (blocks.size() > 1)
    throw CodeBlockError(CodeBlockError::Kind::MultipleCodeBlocks,
                         "MultipleCodeBlocks: response contains " + std::to_string(blocks.size()) +
                             " ```tfcaf blocks; exactly one is required");
  return blocks.front();
}

std::optional<int> parse_selection(const std::string& response, int n_candidates) {
  static const std::regex pattern(R"(\[\s*(\d+)\s*\])");
  std::smatch m;
  if (!std::regex_search(response, m, pattern)) return std::nullopt;
  if (m[1].length() > 6) return std::nullopt;
  const int k = std::stoi(m[1].str());
  if (k < 1 || k > n_candidates) return std::nullopt;
  return k;
}

void SynthesisConfig::validate() const {
  if (k < 1 || t < 1 || r < 0) throw std::invalid_argument("synthesis needs k >= 1, t >= 1, r >= 0");
  if (n_probes < 3 || final_probes < 3) throw std::invalid_argument("probe counts must cover the boundary states");
  if (coder_temperature < 0.0 || evaluator_temperature < 0.0) throw std::invalid_argument("temperatures must be >= 0");
}

SynthesisSession::SynthesisSession(ChatProvider& provider, PromptSet prompts, const dsl::StateSampler& sampler,
                                   int n_agents, SynthesisConfig config)
    : provider_(provider), prompts_(std::move(prompts)), sampler_(sampler), n_agents_(n_agents), config_(config) {
  config_.validate();
  prompts_.validate(n_agents_, sampler_.state_dim());
}

std::string SynthesisSession::call(const std::vector<ChatMessage>& messages, double temperature, int round,
                                   const std::string& role, const std::string& purpose, int candidate) {
  std::string joined;
  for (const auto& m : messages) joined += m.role + "\n" + m.content + "\n";
  std::string response = provider_.complete(messages, temperature);
  calls_.push_back({round, role, purpose, candidate, temperature, sha256_hex(joined), response});
  return response;
}

std::uint64_t SynthesisSession::probe_seed(int round, int index, int attempt) const {
  return splitmix64(config_.seed ^ splitmix64((std::uint64_t(round) << 40) | (std::uint64_t(index) << 20) |
                                              std::uint64_t(attempt)));
}

void SynthesisSession::diagnose(CandidateRecord& record) const {
  record.source.reset();
  record.canonical_source.reset();
  record.validation.reset();
  record.probe.reset();
  record.error_text.clear();
  try {
    record.source = extract_code_block(record.raw_response);
  } catch (const CodeBlockError& e) {
    record.error_text = e.what();
    return;
  }
  dsl::Program program;
  try {
    program = dsl::parse(*record.source);
  } catch (const dsl::ParseError& e) {
    record.error_text = e.what();
    return;
  }
  record.canonical_source = dsl::pretty_print(program);
  record.validation = dsl::validate(program, n_agents_, sampler_.state_dim());
  if (!record.validation->ok) {
    record.error_text = record.validation->describe(*record.source);
    return;
  }
  const int attempt = static_cast<int>(record.repair_history.size());
  record.probe = dsl::probe(program, sampler_, config_.n_probes, probe_seed(record.round, record.index, attempt));
  if (!record.probe->clean()) {
    std::string text = "Probe rejected the program on " + std::to_string(record.probe->failure_count) + " of " +
                        std::to_string(record.probe->n_probes) + " states:";
    for (std::size_t i = 0; i < record.probe->failures.size() && i < 3; ++i)
      text += "\n" + record.probe->failures[i].message;
    record.error_text = text;
  }
}

std::vector<CandidateRecord> SynthesisSession::generate_candidates(int round,
                                                                   const std::optional<std::string>& previous_choice) {
  std::vector<CandidateRecord> out;
  for (int i = 1; i <= config_.k; ++i) {
    const std::string nonce = "r" + std::to_string(round) + "-c" + std::to_string(i) + "-" +
                              hex64(splitmix64(config_.seed + std::uint64_t(round) * 1000 + std::uint64_t(i)));
    const auto messages = assemble_coder_messages(prompts_, previous_choice, std::nullopt, nonce);
    CandidateRecord record;
    record.round = round;
    record.index = i;
    record.raw_response = call(messages, config_.coder_temperature, round, "coder", "generate", i);
    diagnose(record);
    out.push_back(std::move(record));
  }
  return out;
}

CandidateRecord SynthesisSession::repair_candidate(CandidateRecord record) {
  for (int attempt = 0; attempt < config_.r && !record.clean(); ++attempt) {
    const std::string feedback = feedback_for(record);
    const auto messages = assemble_coder_messages(prompts_, std::nullopt, feedback);
    const std::string reply = call(messages, config_.coder_temperature, record.round, "coder", "repair", record.index);
    record.repair_history.push_back({feedback, reply, ""});
    record.raw_response = reply;
    diagnose(record);
    record.repair_history.back().outcome = record.clean() ? "clean" : record.error_text;
  }
  if (!record.clean()) {
    record.dropped = true;
    const std::string last = record.error_text;
    throw RepairBudgetExhausted(std::move(record), "RepairBudgetExhausted: candidate still failing after " +
                                                       std::to_string(config_.r) + " repairs: " + last);
  }
  return record;
}

SelectionEvent SynthesisSession::select_candidate(int round, const std::vector<CandidateRecord>& clean) {
  if (clean.empty()) throw std::invalid_argument("select_candidate needs at least one candidate");
  SelectionEvent ev;
  ev.round = round;
  for (const auto& c : clean) ev.candidate_indices.push_back(c.index);
  if (clean.size() == 1) return ev;

  std::vector<CandidateSummary> summaries;
  for (const auto& c : clean) {
    CandidateSummary s{*c.canonical_source, std::nullopt};
    if (config_.evaluator_sees_stats && c.probe) s.stats = probe_stats(*c.probe);
    summaries.push_back(std::move(s));
  }
  auto messages = assemble_evaluator_messages(prompts_, summaries);
  const int n = static_cast<int>(clean.size());
  std::string reply = call(messages, config_.evaluator_temperature, round, "evaluator", "select", 0);
  ++ev.evaluator_calls;
  auto choice = parse_selection(reply, n);
  if (!choice) {
    messages.push_back({"assistant", reply});
    messages.push_back({"user", "That reply did not name a candidate. Answer with one number between [1] and [" +
                                    std::to_string(n) + "] in square brackets."});
    reply = call(messages, config_.evaluator_temperature, round, "evaluator", "reselect", 0);
    ++ev.evaluator_calls;
    choice = parse_selection(reply, n);
  }
  if (!choice) {
    ev.fallback = true;
    ev.warning = "round " + std::to_string(round) + ": evaluator reply malformed twice; falling back to candidate [1]";
    warnings_.push_back(ev.warning);
    choice = 1;
  }
  ev.chosen = *choice;
  return ev;
}

SynthesisArtifact SynthesisSession::run() {
  SynthesisArtifact art;
  art.config = config_;
  art.binding = {n_agents_, sampler_.state_dim()};
  std::optional<std::string> previous;
  for (int round = 1; round <= config_.t; ++round) {
    auto records = generate_candidates(round, previous);
    std::vector<CandidateRecord> clean;
    std::vector<std::string> reasons;
    for (auto& rec : records) {
      if (!rec.clean()) {
        try {
          rec = repair_candidate(std::move(rec));
        } catch (const RepairBudgetExhausted& e) {
          rec = e.record();
          reasons.push_back("candidate " + std::to_string(rec.index) + ": " + rec.error_text);
        }
      }
      if (rec.clean()) clean.push_back(rec);
      art.candidates.push_back(rec);
    }
    if (clean.empty()) {
      std::string what = "NoViableCandidate: every candidate in round " + std::to_string(round) +
                         " failed after repair";
      for (const auto& r : reasons) what += "\n  " + r;
      art.calls = calls_;
      throw NoViableCandidate(round, what);
    }
    auto ev = select_candidate(round, clean);
    previous = clean[ev.chosen - 1].canonical_source;
    art.selections.push_back(std::move(ev));
  }

  art.final_source = *previous;
  auto program = dsl::parse(art.final_source);
  const auto report = dsl::validate(program, n_agents_, sampler_.state_dim());
  if (!report.ok) throw NoViableCandidate(config_.t, "NoViableCandidate: final program failed validation");
  art.final_probe = dsl::probe(program, sampler_, config_.final_probes, probe_seed(config_.t + 1, 0, 0));
  if (!art.final_probe.clean())
    throw NoViableCandidate(config_.t, "NoViableCandidate: final program failed the closing probe");
  art.warnings = warnings_;
  for (const auto& w : report.warnings) art.warnings.push_back(w);
  art.digest = sha256_hex(art.final_source);
  art.calls = calls_;
  return art;
}

}  // namespace credit::codegen
