#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rpglite::service {

// Credential digests are "pbkdf2-sha256$<iterations>$<salt hex>$<key hex>":
// PBKDF2-HMAC-SHA256, 16-byte salt, 32-byte derived key.
std::string hash_password(std::string_view password, const std::vector<std::uint8_t>& salt, int iterations);
bool verify_password(std::string_view password, const std::string& digest);

std::string sha256_hex(std::string_view data);
std::string to_hex(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> random_bytes(std::size_t n);  // OS entropy

}  // namespace rpglite::service
