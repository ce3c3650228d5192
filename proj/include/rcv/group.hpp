#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

#include "rcv/rng.hpp"

namespace rcv {

/// The subgroup of quadratic residues modulo a safe prime p = 2q + 1.
struct GroupParams {
  mpz_class p;
  mpz_class q;
  mpz_class g;

  /// Canonical text form: "p=<dec>;q=<dec>;g=<dec>".
  std::string to_text() const;
  bool same_group(const GroupParams& other) const { return p == other.p && g == other.g; }
  std::size_t bits() const { return mpz_sizeinbase(p.get_mpz_t(), 2); }
};

using ParamsPtr = std::shared_ptr<const GroupParams>;

/// Validates (primality of p and q with error below 2^-80, p = 2q+1,
/// g a non-trivial quadratic residue) and wraps. Throws InvalidArgument.
ParamsPtr make_params(const mpz_class& p, const mpz_class& q, const mpz_class& g);
ParamsPtr params_from_text(std::string_view text);

/// Deterministic safe-prime search. Throws Error when `budget` candidates
/// are exhausted without a hit.
ParamsPtr generate_params(unsigned bits, std::string_view seed, unsigned long budget = 5'000'000);

/// RFC 3526 MODP groups (safe primes), generator 4.
ParamsPtr standard_group_2048();
ParamsPtr standard_group_3072();

/// Euler's criterion: x^q mod p == 1. Requires 1 <= x <= p-1.
bool is_member(const GroupParams& params, const mpz_class& x);

class Scalar;

class GroupElement {
 public:
  /// Checked construction; throws InvalidArgument if x is not in G.
  static GroupElement from_integer(ParamsPtr params, const mpz_class& x);
  static GroupElement identity(ParamsPtr params);
  static GroupElement generator(ParamsPtr params);

  const mpz_class& value() const { return value_; }
  const ParamsPtr& params() const { return params_; }
  bool is_identity() const { return value_ == 1; }

  GroupElement operator*(const GroupElement& rhs) const;
  GroupElement operator/(const GroupElement& rhs) const;
  GroupElement& operator*=(const GroupElement& rhs);
  GroupElement pow(const Scalar& x) const;
  /// Integer exponent, reduced mod q first (negative allowed).
  GroupElement pow(const mpz_class& x) const;
  GroupElement inv() const;

  bool operator==(const GroupElement& rhs) const { return value_ == rhs.value_; }
  bool operator!=(const GroupElement& rhs) const { return !(*this == rhs); }

  std::string str() const { return value_.get_str(); }

 private:
  GroupElement(ParamsPtr params, mpz_class value) : params_(std::move(params)), value_(std::move(value)) {}
  void check_same(const GroupElement& rhs) const;

  ParamsPtr params_;
  mpz_class value_;

  friend class Scalar;
};

/// Exponent in Z_q.
class Scalar {
 public:
  Scalar(ParamsPtr params, const mpz_class& value);
  static Scalar zero(ParamsPtr params) { return Scalar(std::move(params), 0); }
  static Scalar random(ParamsPtr params, Rng& rng);
  /// Uniform in [1, q-1].
  static Scalar random_nonzero(ParamsPtr params, Rng& rng);

  const mpz_class& value() const { return value_; }
  const ParamsPtr& params() const { return params_; }
  bool is_zero() const { return value_ == 0; }

  Scalar operator+(const Scalar& rhs) const;
  Scalar operator-(const Scalar& rhs) const;
  Scalar operator*(const Scalar& rhs) const;
  Scalar operator-() const;
  Scalar& operator+=(const Scalar& rhs);
  /// Throws InvalidArgument on zero.
  Scalar inverse() const;

  bool operator==(const Scalar& rhs) const { return value_ == rhs.value_; }

  std::string str() const { return value_.get_str(); }

 private:
  void check_same(const Scalar& rhs) const;

  ParamsPtr params_;
  mpz_class value_;
};

}  // namespace rcv
