#pragma once

#include <string>
#include <string_view>

namespace thetac {

// Lowercase hex SHA-256 digests (OpenSSL-backed).
std::string sha256_hex(std::string_view data);
std::string sha256_hex_of_file(const std::string& path);

}  // namespace thetac
