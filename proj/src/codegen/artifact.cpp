#include "credit/codegen/artifact.hpp"

#include <fstream>

#include "credit/dsl/tfcaf_file.hpp"

namespace credit::codegen {
namespace {

using nlohmann::json;

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

json probe_json(const dsl::ProbeReport& p) {
  json failures = json::array();
  for (const auto& f : p.failures) failures.push_back({{"state_digest", f.state_digest}, {"kind", f.kind}, {"message", f.message}});
  json weights = json::array();
  for (const auto& w : p.weight_stats) weights.push_back({{"min", w.min}, {"max", w.max}, {"mean", w.mean}});
  return {{"n_probes", p.n_probes},
          {"failure_count", p.failure_count},
          {"failures", failures},
          {"weight_stats", weights},
          {"negative_weight_seen", p.negative_weight_seen}};
}

json validation_json(const dsl::ValidationReport& v) {
  json errors = json::array();
  for (const auto& e : v.errors) errors.push_back({{"kind", e.kind}, {"message", e.message}});
  return {{"ok", v.ok},
          {"weights_type", v.weights_type ? json(dsl::to_string(*v.weights_type)) : json(nullptr)},
          {"bias_type", v.bias_type ? json(dsl::to_string(*v.bias_type)) : json(nullptr)},
          {"warnings", v.warnings},
          {"errors", errors}};
}

json candidate_json(const CandidateRecord& c) {
  json repairs = json::array();
  for (const auto& r : c.repair_history)
    repairs.push_back({{"error_text", r.error_text}, {"raw_response", r.raw_response}, {"outcome", r.outcome}});
  return {{"round", c.round},
          {"index", c.index},
          {"raw_response", c.raw_response},
          {"source", optional_json(c.source)},
          {"canonical_source", optional_json(c.canonical_source)},
          {"validation", c.validation ? validation_json(*c.validation) : json(nullptr)},
          {"probe", c.probe ? probe_json(*c.probe) : json(nullptr)},
          {"repair_history", repairs},
          {"status", c.clean() ? "clean" : "dropped"},
          {"error_text", c.error_text}};
}

}  // namespace

json manifest_json(const SynthesisArtifact& a) {
  json candidates = json::array();
  for (const auto& c : a.candidates) candidates.push_back(candidate_json(c));
  json selections = json::array();
  for (const auto& s : a.selections)
    selections.push_back({{"round", s.round},
                          {"candidate_indices", s.candidate_indices},
                          {"chosen", s.chosen},
                          {"chosen_candidate", s.candidate_indices.at(s.chosen - 1)},
                          {"evaluator_calls", s.evaluator_calls},
                          {"fallback", s.fallback},
                          {"warning", s.warning}});
  json calls = json::array();
  for (const auto& c : a.calls)
    calls.push_back({{"round", c.round},
                     {"role", c.role},
                     {"purpose", c.purpose},
                     {"candidate", c.candidate},
                     {"temperature", c.temperature},
                     {"request_digest", c.request_digest},
                     {"response", c.response}});
  return {{"format", "credit-synthesis-v1"},
          {"final_source", a.final_source},
          {"digest", a.digest},
          {"binding", {{"n_agents", a.binding.n_agents}, {"state_dim", a.binding.state_dim}}},
          {"config",
           {{"k", a.config.k},
            {"t", a.config.t},
            {"r", a.config.r},
            {"seed", a.config.seed},
            {"n_probes", a.config.n_probes},
            {"final_probes", a.config.final_probes},
            {"evaluator_sees_stats", a.config.evaluator_sees_stats},
            {"coder_temperature", a.config.coder_temperature},
            {"evaluator_temperature", a.config.evaluator_temperature}}},
          {"candidates", candidates},
          {"selections", selections},
          {"provider_calls", calls},
          {"final_probe", probe_json(a.final_probe)},
          {"warnings", a.warnings}};
}

ArtifactPaths write_artifact(const std::filesystem::path& dir, const std::string& name,
                             const SynthesisArtifact& artifact) {
  std::filesystem::create_directories(dir);
  ArtifactPaths paths{dir / (name + ".tfcaf"), dir / (name + ".manifest.json")};
  dsl::write_tfcaf(paths.tfcaf, {artifact.final_source, artifact.digest, artifact.binding});
  std::ofstream out(paths.manifest, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + paths.manifest.string());
  out << manifest_json(artifact).dump(2) << '\n';
  return paths;
}

}  // namespace credit::codegen
