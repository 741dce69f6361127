#include "rpglite/service/auth.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/rand.h>

#include <stdexcept>

namespace rpglite::service {

namespace {

std::vector<std::uint8_t> from_hex(std::string_view hex) {
  if (hex.size() % 2) return {};
  std::vector<std::uint8_t> out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto nibble = [](char c) -> int {
      if (c >= '0' && c <= '9') return c - '0';
      if (c >= 'a' && c <= 'f') return c - 'a' + 10;
      return -1;
    };
    const int hi = nibble(hex[2 * i]), lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) return {};
    out[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return out;
}

std::vector<std::uint8_t> derive(std::string_view password, const std::vector<std::uint8_t>& salt, int iterations) {
  std::vector<std::uint8_t> key(32);
  if (PKCS5_PBKDF2_HMAC(password.data(), static_cast<int>(password.size()), salt.data(), static_cast<int>(salt.size()),
                        iterations, EVP_sha256(), static_cast<int>(key.size()), key.data()) != 1) {
    throw std::runtime_error("PBKDF2 failed");
  }
  return key;
}

}  // namespace

std::string to_hex(const std::vector<std::uint8_t>& bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out += digits[b >> 4];
    out += digits[b & 15];
  }
  return out;
}

std::string hash_password(std::string_view password, const std::vector<std::uint8_t>& salt, int iterations) {
  return "pbkdf2-sha256$" + std::to_string(iterations) + "$" + to_hex(salt) + "$" +
         to_hex(derive(password, salt, iterations));
}

bool verify_password(std::string_view password, const std::string& digest) {
  const auto a = digest.find('$');
  const auto b = a == std::string::npos ? a : digest.find('$', a + 1);
  const auto c = b == std::string::npos ? b : digest.find('$', b + 1);
  if (c == std::string::npos || digest.substr(0, a) != "pbkdf2-sha256") return false;
  int iterations = 0;
  try {
    iterations = std::stoi(digest.substr(a + 1, b - a - 1));
  } catch (const std::exception&) {
    return false;
  }
  const auto salt = from_hex(std::string_view(digest).substr(b + 1, c - b - 1));
  const auto expected = from_hex(std::string_view(digest).substr(c + 1));
  if (iterations < 1 || salt.empty() || expected.size() != 32) return false;
  const auto got = derive(password, salt, iterations);
  return CRYPTO_memcmp(got.data(), expected.data(), got.size()) == 0;
}

std::string sha256_hex(std::string_view data) {
  std::vector<std::uint8_t> out(32);
  unsigned len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  return to_hex(out);
}

std::vector<std::uint8_t> random_bytes(std::size_t n) {
  std::vector<std::uint8_t> out(n);
  if (RAND_bytes(out.data(), static_cast<int>(n)) != 1) throw std::runtime_error("RAND_bytes failed");
  return out;
}

}  // namespace rpglite::service
