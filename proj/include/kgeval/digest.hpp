#pragma once

#include <string>
#include <string_view>

namespace kgeval {

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

/// Standard base64 with padding.
std::string base64_encode(std::string_view data);

}  // namespace kgeval
