#pragma once

#include <span>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace credit {

// Lowercase hex SHA-256 of the given bytes.
std::string sha256_hex(std::string_view bytes);

// Short (16 hex chars) digest of a real vector's raw bytes. Used to tag
// probe states in error reports.
std::string state_digest(const Eigen::VectorXd& state);

}  // namespace credit
