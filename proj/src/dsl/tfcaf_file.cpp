#include "credit/dsl/tfcaf_file.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "credit/common/digest.hpp"
#include "credit/dsl/parser.hpp"
#include "credit/dsl/validate.hpp"

namespace credit::dsl {
namespace {

constexpr std::string_view kMagic = "# tfcaf 1";

std::string header_value(const std::string& line, std::string_view key) {
  const std::string prefix = "# " + std::string(key) + ": ";
  if (line.rfind(prefix, 0) != 0) throw std::runtime_error("tfcaf: expected header '" + prefix + "'");
  return line.substr(prefix.size());
}

}  // namespace

std::string render_tfcaf(const TfcafFile& file) {
  std::ostringstream out;
  out << kMagic << '\n'
      << "# n_agents: " << file.binding.n_agents << '\n'
      << "# state_dim: " << file.binding.state_dim << '\n'
      << "# digest: " << file.digest << '\n'
      << file.source;
  return out.str();
}

TfcafFile parse_tfcaf(const std::string& text) {
  std::istringstream in(text);
  std::string magic, n_line, d_line, digest_line;
  if (!std::getline(in, magic) || magic != kMagic) throw std::runtime_error("tfcaf: missing '# tfcaf 1' header");
  if (!std::getline(in, n_line) || !std::getline(in, d_line) || !std::getline(in, digest_line))
    throw std::runtime_error("tfcaf: truncated header");
  TfcafFile file;
  file.binding.n_agents = std::stoi(header_value(n_line, "n_agents"));
  file.binding.state_dim = std::stoi(header_value(d_line, "state_dim"));
  file.digest = header_value(digest_line, "digest");
  std::ostringstream rest;
  rest << in.rdbuf();
  file.source = rest.str();
  if (sha256_hex(file.source) != file.digest) throw std::runtime_error("tfcaf: digest does not match source");
  return file;
}

void write_tfcaf(const std::filesystem::path& path, const TfcafFile& file) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << render_tfcaf(file);
}

TfcafFile read_tfcaf(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_tfcaf(ss.str());
}

Program load_tfcaf_program(const std::filesystem::path& path, int n_agents, int state_dim) {
  const TfcafFile file = read_tfcaf(path);
  if (file.binding.n_agents != n_agents || file.binding.state_dim != state_dim)
    throw std::runtime_error("TFCAF artifact " + path.string() + " is bound to n_agents=" +
                             std::to_string(file.binding.n_agents) + ", state_dim=" +
                             std::to_string(file.binding.state_dim) + " but the environment has n_agents=" +
                             std::to_string(n_agents) + ", state_dim=" + std::to_string(state_dim));
  Program program = parse(file.source);
  const auto report = validate(program, n_agents, state_dim);
  if (!report.ok) throw std::runtime_error("TFCAF artifact failed validation:\n" + report.describe(file.source));
  return program;
}

}  // namespace credit::dsl
