#pragma once

#include <gmpxx.h>

#include <string>

#include "rcv/group.hpp"

namespace rcv::test {

/// p = 23, q = 11, g = 4: small enough to enumerate everything.
inline ParamsPtr tiny_group() {
  static const ParamsPtr params = make_params(23, 11, 4);
  return params;
}

/// Generated once per process; deterministic.
inline ParamsPtr group_bits(unsigned bits) { return generate_params(bits, "fixture"); }

inline ParamsPtr group64() {
  static const ParamsPtr params = group_bits(64);
  return params;
}

inline ParamsPtr group128() {
  static const ParamsPtr params = group_bits(128);
  return params;
}

inline ParamsPtr group256() {
  static const ParamsPtr params = group_bits(256);
  return params;
}

inline ParamsPtr group512() {
  static const ParamsPtr params = group_bits(512);
  return params;
}

inline GroupElement elem(const ParamsPtr& params, long v) { return GroupElement::from_integer(params, v); }
inline Scalar scal(const ParamsPtr& params, long v) { return Scalar(params, v); }

/// Repeated multiplication; independent of mpz_powm.
inline long naive_pow(long base, long exp, long mod) {
  long acc = 1;
  for (long i = 0; i < exp; ++i) acc = acc * base % mod;
  return acc;
}

inline bool trial_division_prime(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

/// Discrete log by enumeration (tiny groups only).
inline long brute_dlog(const GroupElement& base, const GroupElement& target) {
  const long q = base.params()->q.get_si();
  GroupElement acc = GroupElement::identity(base.params());
  for (long x = 0; x < q; ++x) {
    if (acc == target) return x;
    acc = acc * base;
  }
  return -1;
}

}  // namespace rcv::test
