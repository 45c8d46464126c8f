#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "credit/codegen/pipeline.hpp"

namespace credit::codegen {

// Machine-readable record of a synthesis run: every candidate, repair,
// selection and provider exchange. Contains no timestamps, so replaying a
// transcript reproduces it byte for byte.
nlohmann::json manifest_json(const SynthesisArtifact& artifact);

struct ArtifactPaths {
  std::filesystem::path tfcaf;
  std::filesystem::path manifest;
};

// Writes <dir>/<name>.tfcaf and <dir>/<name>.manifest.json.
ArtifactPaths write_artifact(const std::filesystem::path& dir, const std::string& name,
                             const SynthesisArtifact& artifact);

}  // namespace credit::codegen
