#pragma once

#include <cstdint>
#include <vector>

#include "rcv/group.hpp"

namespace rcv {

/// The `count` smallest primes that are quadratic residues mod p, ascending.
/// Throws InvalidArgument if the table would reach p.
std::vector<mpz_class> qr_primes(const GroupParams& params, std::size_t count);

/// Embeds 1 <= x <= q into G (x or p - x, whichever is a residue).
GroupElement embed_integer(const ParamsPtr& params, const mpz_class& x);
/// Inverse of embed_integer.
mpz_class extract_integer(const GroupElement& e);

/// Voting options 1..k as the first k residue primes; a selection is the
/// product of the selected primes.
class OptionEncoding {
 public:
  /// Throws InvalidArgument if the product of all k primes reaches p.
  OptionEncoding(ParamsPtr params, int options);

  int options() const { return static_cast<int>(primes_.size()); }
  const ParamsPtr& params() const { return params_; }

  GroupElement gamma(int option) const;
  GroupElement encode_choice(const std::vector<bool>& choices) const;
  /// Trial division by the option primes, each at most once. Throws
  /// MalformedPlaintext if anything is left over.
  std::vector<bool> decode_choice(const GroupElement& v) const;

 private:
  ParamsPtr params_;
  std::vector<mpz_class> primes_;
};

enum class CodeMode { Sparse, Dense };

const char* to_string(CodeMode mode);
CodeMode code_mode_from_string(std::string_view s);

/// Worst-case check: true iff the largest product of code primes that any
/// k codes of l bits can produce stays below p. Dense mode pads l to a
/// multiple of 5 and uses 32 primes per 5-bit chunk.
bool capacity(const GroupParams& params, int options, int code_bits, CodeMode mode);
/// Largest l with capacity(params, 1, l, mode).
int max_code_bits(const GroupParams& params, CodeMode mode);

/// Return codes 1..m for k options. Code c is represented by the bits of
/// c - 1; option i owns its own block of the prime table.
class CodeEncoding {
 public:
  /// Throws InvalidArgument on m > 2^l, l > 62 or insufficient capacity.
  CodeEncoding(ParamsPtr params, int options, int code_bits, std::uint64_t code_space, CodeMode mode);

  int options() const { return options_; }
  int code_bits() const { return code_bits_; }
  std::uint64_t code_space() const { return code_space_; }
  CodeMode mode() const { return mode_; }
  int chunks() const { return (code_bits_ + 4) / 5; }
  const std::vector<mpz_class>& prime_table() const { return primes_; }
  const ParamsPtr& params() const { return params_; }

  GroupElement delta(int option, std::uint64_t code) const;
  /// Factorizes a product of one delta value per option. Throws
  /// MalformedPlaintext on leftover factors, repeated primes, dense chunks
  /// without exactly one prime, or codes outside 1..m.
  std::vector<std::uint64_t> decode_codes(const GroupElement& product) const;

 private:
  std::size_t block_size() const;

  ParamsPtr params_;
  int options_;
  int code_bits_;
  std::uint64_t code_space_;
  CodeMode mode_;
  std::vector<mpz_class> primes_;
};

}  // namespace rcv
