#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "pl/common/codec.hpp"

namespace pl::crypto {

using Digest = std::array<std::uint8_t, 32>;
using PublicKey = std::array<std::uint8_t, 32>;
using Seed = std::array<std::uint8_t, 32>;
using Signature = std::array<std::uint8_t, 64>;

Digest sha256(ByteView data);

/// Streaming SHA-256 for hashing concatenations without copying.
class Sha256 {
 public:
  Sha256();
  Sha256& update(ByteView data);
  Sha256& update(std::uint8_t byte) { return update(ByteView(&byte, 1)); }
  Digest finish();

 private:
  alignas(64) std::array<unsigned char, 128> state_{};
};

/// Ed25519 signing key. The 32-byte seed is the serialized form.
class SigningKey {
 public:
  static SigningKey generate();
  static SigningKey from_seed(const Seed& seed);

  Signature sign(ByteView message) const;
  const PublicKey& public_key() const noexcept { return public_key_; }
  Seed seed() const;

 private:
  SigningKey() = default;

  std::array<std::uint8_t, 64> secret_{};
  PublicKey public_key_{};
};

bool verify(const PublicKey& key, ByteView message, const Signature& signature);

void fill_random(std::span<std::uint8_t> out);

std::string to_hex(ByteView data);
/// Throws std::invalid_argument on odd length or non-hex characters.
Bytes from_hex(std::string_view hex);

template <std::size_t N>
std::array<std::uint8_t, N> fixed_from_hex(std::string_view hex) {
  auto raw = from_hex(hex);
  if (raw.size() != N) throw std::invalid_argument("hex value has wrong length");
  std::array<std::uint8_t, N> out{};
  std::copy(raw.begin(), raw.end(), out.begin());
  return out;
}

std::string base64_encode(ByteView data);
/// Throws std::invalid_argument on malformed input.
Bytes base64_decode(std::string_view text);

}  // namespace pl::crypto
