#include "rcv/hash.hpp"

#include <openssl/sha.h>

namespace rcv {

Digest sha256(std::span<const std::uint8_t> data) {
  Digest out{};
  SHA256(data.data(), data.size(), out.data());
  return out;
}

Digest sha256(std::string_view data) {
  return sha256(std::span(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

FiatShamir::FiatShamir(std::string_view domain) { append_item("domain", domain); }

void FiatShamir::append_item(std::string_view label, std::string_view bytes) {
  auto put_len = [this](std::size_t n) {
    for (int i = 0; i < 4; ++i) buffer_.push_back(static_cast<char>((n >> (8 * i)) & 0xff));
  };
  put_len(label.size());
  buffer_.append(label);
  put_len(bytes.size());
  buffer_.append(bytes);
}

FiatShamir& FiatShamir::add(std::string_view label, const mpz_class& value) {
  append_item(label, value.get_str(16));
  return *this;
}

FiatShamir& FiatShamir::add(std::string_view label, std::string_view bytes) {
  append_item(label, bytes);
  return *this;
}

FiatShamir& FiatShamir::add(std::string_view label, std::uint64_t value) {
  append_item(label, std::to_string(value));
  return *this;
}

Digest FiatShamir::digest() const { return sha256(buffer_); }

mpz_class FiatShamir::challenge(const mpz_class& modulus) const {
  const Digest seed = digest();
  const std::size_t want_bits = mpz_sizeinbase(modulus.get_mpz_t(), 2) + 128;
  mpz_class acc = 0;
  std::size_t have_bits = 0;
  for (std::uint32_t ctr = 0; have_bits < want_bits; ++ctr) {
    std::string block(seed.begin(), seed.end());
    for (int i = 0; i < 4; ++i) block.push_back(static_cast<char>((ctr >> (8 * i)) & 0xff));
    const Digest d = sha256(block);
    mpz_class part;
    mpz_import(part.get_mpz_t(), d.size(), 1, 1, 1, 0, d.data());
    acc = (acc << 256) + part;
    have_bits += 256;
  }
  mpz_class out;
  mpz_mod(out.get_mpz_t(), acc.get_mpz_t(), modulus.get_mpz_t());
  return out;
}

}  // namespace rcv
