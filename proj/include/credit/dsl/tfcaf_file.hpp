#pragma once

#include <filesystem>
#include <string>

#include "credit/dsl/ast.hpp"

namespace credit::dsl {

// On-disk form of a synthesized program:
//
//   # tfcaf 1
//   # n_agents: <n>
//   # state_dim: <d>
//   # digest: <sha256 hex of the canonical source below>
//   weights: ...
//   bias: ...
//
// The source part is exactly pretty_print(program).
struct TfcafFile {
  std::string source;  // canonical
  std::string digest;
  Binding binding;
};

std::string render_tfcaf(const TfcafFile& file);
TfcafFile parse_tfcaf(const std::string& text);

void write_tfcaf(const std::filesystem::path& path, const TfcafFile& file);
// Reads, checks the digest against the source bytes, and returns the header.
TfcafFile read_tfcaf(const std::filesystem::path& path);

// Reads a .tfcaf file, parses and validates it against the given dims.
// Throws std::runtime_error with a dimension message on any mismatch.
Program load_tfcaf_program(const std::filesystem::path& path, int n_agents, int state_dim);

}  // namespace credit::dsl
