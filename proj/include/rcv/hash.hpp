#pragma once

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace rcv {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::span<const std::uint8_t> data);
Digest sha256(std::string_view data);
std::string to_hex(std::span<const std::uint8_t> bytes);

/// Domain-separated hash used for every Fiat-Shamir challenge and for the
/// code-masking function of the OT model. Items are length-prefixed so no
/// two distinct item sequences serialize to the same bytes.
class FiatShamir {
 public:
  explicit FiatShamir(std::string_view domain);

  FiatShamir& add(std::string_view label, const mpz_class& value);
  FiatShamir& add(std::string_view label, std::string_view bytes);
  FiatShamir& add(std::string_view label, std::uint64_t value);

  Digest digest() const;
  /// Uniform-ish value in [0, modulus): expands the transcript to
  /// bitlen(modulus)+128 bits and reduces.
  mpz_class challenge(const mpz_class& modulus) const;

 private:
  void append_item(std::string_view label, std::string_view bytes);

  std::string buffer_;
};

}  // namespace rcv
