#include "credit/autodiff/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace credit::ad {
namespace {

constexpr const char* kFormat = "credit-ckpt-v1";

void put_le(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
}

double get_le(const std::string& in, std::size_t at) {
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b)
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[at + static_cast<std::size_t>(b)])) << (8 * b);
  return std::bit_cast<double>(bits);
}

}  // namespace

const MlpParams<double>& Checkpoint::get(const std::string& name) const {
  for (const auto& n : nets)
    if (n.name == name) return n.params;
  throw std::out_of_range("checkpoint has no net named '" + name + "'");
}

std::string encode_checkpoint(const Checkpoint& ckpt) {
  nlohmann::json header;
  header["format"] = kFormat;
  header["seed"] = ckpt.seed;
  header["step"] = ckpt.step;
  auto nets = nlohmann::json::array();
  for (const auto& n : ckpt.nets) {
    auto shapes = nlohmann::json::array();
    for (const auto& l : n.params.layers) shapes.push_back({l.weight.rows(), l.weight.cols()});
    nets.push_back({{"name", n.name}, {"layers", shapes}});
  }
  header["nets"] = nets;

  std::string out = header.dump();
  out.push_back('\n');
  for (const auto& n : ckpt.nets)
    for (double v : flatten(n.params)) put_le(out, v);
  return out;
}

Checkpoint decode_checkpoint(const std::string& bytes) {
  const auto newline = bytes.find('\n');
  if (newline == std::string::npos) throw std::runtime_error("checkpoint: missing header line");
  const auto header = nlohmann::json::parse(bytes.substr(0, newline));
  if (header.value("format", "") != kFormat) throw std::runtime_error("checkpoint: unknown format tag");

  Checkpoint ckpt;
  ckpt.seed = header.at("seed").get<std::uint64_t>();
  ckpt.step = header.at("step").get<std::int64_t>();
  std::size_t at = newline + 1;
  for (const auto& n : header.at("nets")) {
    std::vector<int> dims;
    for (const auto& shape : n.at("layers")) {
      if (dims.empty()) dims.push_back(shape.at(1).get<int>());
      dims.push_back(shape.at(0).get<int>());
    }
    NamedNet net{n.at("name").get<std::string>(), MlpParams<double>::zeros(dims)};
    const auto count = static_cast<std::size_t>(param_count(net.params));
    if (bytes.size() < at + 8 * count) throw std::runtime_error("checkpoint: truncated parameter data");
    std::vector<double> flat(count);
    for (std::size_t i = 0; i < count; ++i) flat[i] = get_le(bytes, at + 8 * i);
    at += 8 * count;
    unflatten<double>(net.params, flat);
    ckpt.nets.push_back(std::move(net));
  }
  if (at != bytes.size()) throw std::runtime_error("checkpoint: trailing bytes after parameters");
  return ckpt;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  const std::string bytes = encode_checkpoint(ckpt);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read checkpoint " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_checkpoint(ss.str());
}

}  // namespace credit::ad
