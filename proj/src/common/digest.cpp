#include "credit/common/digest.hpp"

#include <array>

#include <openssl/sha.h>

namespace credit {

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, SHA256_DIGEST_LENGTH> md{};
  SHA256(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), md.data());
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(md.size() * 2);
  for (unsigned char c : md) {
    out.push_back(kHex[c >> 4]);
    out.push_back(kHex[c & 0xF]);
  }
  return out;
}

std::string state_digest(const Eigen::VectorXd& state) {
  std::string_view raw(reinterpret_cast<const char*>(state.data()),
                       static_cast<std::size_t>(state.size()) * sizeof(double));
  return sha256_hex(raw).substr(0, 16);
}

}  // namespace credit
