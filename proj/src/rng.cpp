#include "rcv/rng.hpp"

#include <algorithm>
#include <cstring>
#include <vector>

namespace rcv {

Rng::Rng(std::string_view seed) {
  std::string material = "rcv-rng/";
  material.append(seed);
  key_ = sha256(material);
}

Rng Rng::fork(std::string_view label) const {
  std::string child = to_hex(key_);
  child.push_back('/');
  child.append(label);
  return Rng(child);
}

void Rng::refill() {
  std::uint8_t buf[sizeof(Digest) + 8];
  std::memcpy(buf, key_.data(), key_.size());
  for (int i = 0; i < 8; ++i) buf[key_.size() + i] = static_cast<std::uint8_t>(counter_ >> (8 * i));
  ++counter_;
  block_ = sha256(std::span<const std::uint8_t>(buf, sizeof buf));
  used_ = 0;
}

void Rng::fill(std::span<std::uint8_t> out) {
  std::size_t pos = 0;
  while (pos < out.size()) {
    if (used_ == block_.size()) refill();
    const std::size_t n = std::min(out.size() - pos, block_.size() - used_);
    std::memcpy(out.data() + pos, block_.data() + used_, n);
    used_ += n;
    pos += n;
  }
}

std::uint64_t Rng::next_u64() {
  std::uint8_t b[8];
  fill(b);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

bool Rng::next_bit() {
  std::uint8_t b[1];
  fill(b);
  return (b[0] & 1) != 0;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) return 0;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  for (;;) {
    const std::uint64_t v = next_u64();
    if (v < limit) return v % bound;
  }
}

mpz_class Rng::below(const mpz_class& bound) {
  const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
  const std::size_t bytes = (bits + 7) / 8;
  std::vector<std::uint8_t> buf(bytes);
  const unsigned excess = static_cast<unsigned>(bytes * 8 - bits);
  mpz_class v;
  for (;;) {
    fill(buf);
    buf[0] &= static_cast<std::uint8_t>(0xff >> excess);
    mpz_import(v.get_mpz_t(), buf.size(), 1, 1, 1, 0, buf.data());
    if (v < bound) return v;
  }
}

}  // namespace rcv
