#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "rcv/hash.hpp"

namespace rcv {

/// Deterministic random stream (SHA-256 in counter mode). Every protocol
/// run threads one of these through, so runs replay bit-for-bit from a seed.
class Rng {
 public:
  explicit Rng(std::string_view seed);

  /// Independent child stream; depends only on this stream's seed and the
  /// label, not on how much of this stream has been consumed.
  Rng fork(std::string_view label) const;

  void fill(std::span<std::uint8_t> out);
  std::uint64_t next_u64();
  bool next_bit();
  /// Uniform in [0, bound) by rejection sampling. bound must be positive.
  mpz_class below(const mpz_class& bound);
  std::uint64_t below(std::uint64_t bound);

 private:
  void refill();

  Digest key_{};
  std::uint64_t counter_ = 0;
  Digest block_{};
  std::size_t used_ = sizeof(Digest);
};

}  // namespace rcv
