#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "credit/autodiff/mlp.hpp"

namespace credit::ad {

struct NamedNet {
  std::string name;
  MlpParams<double> params;
};

struct Checkpoint {
  std::vector<NamedNet> nets;
  std::uint64_t seed = 0;
  std::int64_t step = 0;

  const MlpParams<double>& get(const std::string& name) const;
};

// File layout: one line of JSON header (format tag, seed, step, and for each
// net its name and [rows, cols] per layer) terminated by '\n', followed by
// every parameter as a little-endian IEEE-754 binary64, net by net, layer by
// layer, row-major weights then bias.
void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::filesystem::path& path);

std::string encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(const std::string& bytes);

}  // namespace credit::ad
