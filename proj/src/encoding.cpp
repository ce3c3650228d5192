#include "rcv/encoding.hpp"

#include <string>

#include "rcv/error.hpp"

namespace rcv {

namespace {

constexpr int kDenseChunkBits = 5;
constexpr std::size_t kDenseChunkPrimes = 32;

std::size_t dense_chunks(int code_bits) { return static_cast<std::size_t>((code_bits + 4) / 5); }

int chunk_width(int code_bits, std::size_t chunk) {
  const int rest = code_bits - static_cast<int>(chunk) * kDenseChunkBits;
  return rest < kDenseChunkBits ? rest : kDenseChunkBits;
}

// Largest product any single option's code can contribute, given that
// option's slice of the prime table.
mpz_class worst_case_block(const std::vector<mpz_class>& block, int code_bits, CodeMode mode) {
  mpz_class prod = 1;
  if (mode == CodeMode::Sparse) {
    for (const auto& p : block) prod *= p;
    return prod;
  }
  for (std::size_t c = 0; c < dense_chunks(code_bits); ++c) {
    const std::size_t top = (std::size_t{1} << chunk_width(code_bits, c)) - 1;
    prod *= block[c * kDenseChunkPrimes + top];
  }
  return prod;
}

std::size_t table_size(int options, int code_bits, CodeMode mode) {
  const auto k = static_cast<std::size_t>(options);
  if (mode == CodeMode::Sparse) return k * static_cast<std::size_t>(code_bits);
  return k * dense_chunks(code_bits) * kDenseChunkPrimes;
}

}  // namespace

std::vector<mpz_class> qr_primes(const GroupParams& params, std::size_t count) {
  std::vector<mpz_class> out;
  out.reserve(count);
  mpz_class candidate = 1;
  while (out.size() < count) {
    mpz_nextprime(candidate.get_mpz_t(), candidate.get_mpz_t());
    if (candidate >= params.p) throw InvalidArgument("group too small for the requested prime table");
    if (is_member(params, candidate)) out.push_back(candidate);
  }
  return out;
}

GroupElement embed_integer(const ParamsPtr& params, const mpz_class& x) {
  if (x < 1 || x > params->q) throw InvalidArgument("integer out of embeddable range");
  if (is_member(*params, x)) return GroupElement::from_integer(params, x);
  return GroupElement::from_integer(params, params->p - x);
}

mpz_class extract_integer(const GroupElement& e) {
  const auto& params = *e.params();
  return e.value() <= params.q ? e.value() : mpz_class(params.p - e.value());
}

// ---- OptionEncoding ---------------------------------------------------------

OptionEncoding::OptionEncoding(ParamsPtr params, int options) : params_(std::move(params)) {
  if (options < 1) throw InvalidArgument("need at least one option");
  primes_ = qr_primes(*params_, static_cast<std::size_t>(options));
  mpz_class prod = 1;
  for (const auto& p : primes_) prod *= p;
  if (prod >= params_->p) throw InvalidArgument("option encoding exceeds group capacity");
}

GroupElement OptionEncoding::gamma(int option) const {
  if (option < 1 || option > options()) throw InvalidArgument("option index out of range");
  return GroupElement::from_integer(params_, primes_[static_cast<std::size_t>(option - 1)]);
}

GroupElement OptionEncoding::encode_choice(const std::vector<bool>& choices) const {
  if (static_cast<int>(choices.size()) != options()) throw InvalidArgument("choice vector has wrong length");
  mpz_class prod = 1;
  for (std::size_t i = 0; i < choices.size(); ++i)
    if (choices[i]) prod *= primes_[i];
  return GroupElement::from_integer(params_, prod);
}

std::vector<bool> OptionEncoding::decode_choice(const GroupElement& v) const {
  mpz_class rest = v.value();
  std::vector<bool> out(primes_.size(), false);
  for (std::size_t i = 0; i < primes_.size(); ++i) {
    if (mpz_divisible_p(rest.get_mpz_t(), primes_[i].get_mpz_t())) {
      mpz_divexact(rest.get_mpz_t(), rest.get_mpz_t(), primes_[i].get_mpz_t());
      out[i] = true;
    }
  }
  if (rest != 1) throw MalformedPlaintext("choice plaintext does not decompose into distinct option primes");
  return out;
}

// ---- capacity ---------------------------------------------------------------

const char* to_string(CodeMode mode) { return mode == CodeMode::Sparse ? "sparse" : "dense"; }

CodeMode code_mode_from_string(std::string_view s) {
  if (s == "sparse") return CodeMode::Sparse;
  if (s == "dense") return CodeMode::Dense;
  throw InvalidArgument("unknown code encoding mode: " + std::string(s));
}

bool capacity(const GroupParams& params, int options, int code_bits, CodeMode mode) {
  if (options < 1 || code_bits < 1) throw InvalidArgument("capacity needs k >= 1 and l >= 1");
  std::vector<mpz_class> table;
  try {
    table = qr_primes(params, table_size(options, code_bits, mode));
  } catch (const InvalidArgument&) {
    return false;
  }
  const std::size_t block = table.size() / static_cast<std::size_t>(options);
  mpz_class prod = 1;
  for (int i = 0; i < options; ++i) {
    const auto first = table.begin() + static_cast<std::ptrdiff_t>(block * static_cast<std::size_t>(i));
    prod *= worst_case_block(std::vector<mpz_class>(first, first + static_cast<std::ptrdiff_t>(block)), code_bits,
                             mode);
    if (prod >= params.p) return false;
  }
  return true;
}

int max_code_bits(const GroupParams& params, CodeMode mode) {
  // Equivalent to the largest l with capacity(params, 1, l, mode), computed
  // with a single pass over the prime sequence.
  mpz_class prod = 1;
  mpz_class candidate = 1;
  auto next_qr_prime = [&]() -> const mpz_class& {
    do {
      mpz_nextprime(candidate.get_mpz_t(), candidate.get_mpz_t());
    } while (candidate < params.p && !is_member(params, candidate));
    return candidate;
  };
  int bits = 0;
  if (mode == CodeMode::Sparse) {
    for (;;) {
      const mpz_class& p = next_qr_prime();
      if (p >= params.p || prod * p >= params.p) return bits;
      prod *= p;
      ++bits;
    }
  }
  for (;;) {
    std::vector<mpz_class> group;
    for (std::size_t i = 0; i < kDenseChunkPrimes; ++i) {
      const mpz_class& p = next_qr_prime();
      if (p >= params.p) return bits;
      group.push_back(p);
    }
    for (int width = 1; width <= kDenseChunkBits; ++width) {
      if (prod * group[(std::size_t{1} << width) - 1] >= params.p) return bits;
      ++bits;
    }
    prod *= group.back();
  }
}

// ---- CodeEncoding -----------------------------------------------------------

CodeEncoding::CodeEncoding(ParamsPtr params, int options, int code_bits, std::uint64_t code_space, CodeMode mode)
    : params_(std::move(params)), options_(options), code_bits_(code_bits), code_space_(code_space), mode_(mode) {
  if (options < 1) throw InvalidArgument("need at least one option");
  if (code_bits < 1 || code_bits > 62) throw InvalidArgument("code bits must be in 1..62");
  if (code_space < 1 || code_space > (std::uint64_t{1} << code_bits))
    throw InvalidArgument("code space m must satisfy 1 <= m <= 2^l");
  if (!capacity(*params_, options, code_bits, mode))
    throw InvalidArgument("k codes of l bits do not fit in one ciphertext of this group");
  primes_ = qr_primes(*params_, table_size(options, code_bits, mode));
}

std::size_t CodeEncoding::block_size() const { return primes_.size() / static_cast<std::size_t>(options_); }

GroupElement CodeEncoding::delta(int option, std::uint64_t code) const {
  if (option < 1 || option > options_) throw InvalidArgument("option index out of range");
  if (code < 1 || code > code_space_) throw InvalidArgument("code outside 1..m");
  const std::uint64_t bits = code - 1;
  const std::size_t base = block_size() * static_cast<std::size_t>(option - 1);
  mpz_class prod = 1;
  if (mode_ == CodeMode::Sparse) {
    for (int j = 0; j < code_bits_; ++j)
      if ((bits >> j) & 1) prod *= primes_[base + static_cast<std::size_t>(j)];
  } else {
    for (std::size_t c = 0; c < dense_chunks(code_bits_); ++c) {
      const std::uint64_t symbol = (bits >> (c * kDenseChunkBits)) & 0x1f;
      prod *= primes_[base + c * kDenseChunkPrimes + symbol];
    }
  }
  return GroupElement::from_integer(params_, prod);
}

std::vector<std::uint64_t> CodeEncoding::decode_codes(const GroupElement& product) const {
  mpz_class rest = product.value();
  std::vector<std::uint64_t> codes;
  const std::size_t block = block_size();
  for (int i = 0; i < options_; ++i) {
    const std::size_t base = block * static_cast<std::size_t>(i);
    std::uint64_t bits = 0;
    if (mode_ == CodeMode::Sparse) {
      for (std::size_t j = 0; j < block; ++j) {
        const auto& p = primes_[base + j];
        if (mpz_divisible_p(rest.get_mpz_t(), p.get_mpz_t())) {
          mpz_divexact(rest.get_mpz_t(), rest.get_mpz_t(), p.get_mpz_t());
          bits |= std::uint64_t{1} << j;
        }
      }
    } else {
      for (std::size_t c = 0; c < dense_chunks(code_bits_); ++c) {
        int hits = 0;
        for (std::size_t s = 0; s < kDenseChunkPrimes; ++s) {
          const auto& p = primes_[base + c * kDenseChunkPrimes + s];
          if (mpz_divisible_p(rest.get_mpz_t(), p.get_mpz_t())) {
            mpz_divexact(rest.get_mpz_t(), rest.get_mpz_t(), p.get_mpz_t());
            bits |= static_cast<std::uint64_t>(s) << (c * kDenseChunkBits);
            ++hits;
          }
        }
        if (hits != 1) throw MalformedPlaintext("dense chunk does not carry exactly one prime");
      }
    }
    const std::uint64_t code = bits + 1;
    if (code > code_space_) throw MalformedPlaintext("decoded code outside 1..m");
    codes.push_back(code);
  }
  if (rest != 1) throw MalformedPlaintext("code plaintext has a leftover factor");
  return codes;
}

}  // namespace rcv
