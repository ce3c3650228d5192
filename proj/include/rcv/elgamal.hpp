#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "rcv/group.hpp"
#include "rcv/sigma.hpp"

namespace rcv {

/// ElGamal ciphertext (g^r, m * pk^r).
struct Ciphertext {
  GroupElement a;
  GroupElement b;

  Ciphertext operator*(const Ciphertext& rhs) const { return {a * rhs.a, b * rhs.b}; }
  Ciphertext operator/(const Ciphertext& rhs) const { return {a / rhs.a, b / rhs.b}; }
  Ciphertext pow(const Scalar& x) const { return {a.pow(x), b.pow(x)}; }
  bool operator==(const Ciphertext& rhs) const { return a == rhs.a && b == rhs.b; }
  bool operator!=(const Ciphertext& rhs) const { return !(*this == rhs); }
};

struct KeyPair {
  Scalar sk;
  GroupElement pk;
};

KeyPair keygen(const ParamsPtr& params, Rng& rng);
KeyPair keypair_from_secret(const Scalar& sk);

Ciphertext encrypt(const GroupElement& pk, const GroupElement& m, const Scalar& r);
Ciphertext encrypt(const GroupElement& pk, const GroupElement& m, Rng& rng);
/// Encryption with the publicly agreed randomness 1, recomputable by anyone.
Ciphertext encrypt_deterministic(const GroupElement& pk, const GroupElement& m);
GroupElement decrypt(const Scalar& sk, const Ciphertext& c);
Ciphertext homomorphic_mul(const Ciphertext& c1, const Ciphertext& c2);
Ciphertext reencrypt(const GroupElement& pk, const Ciphertext& c, const Scalar& r);

// ---- threshold layer --------------------------------------------------------

/// Joint public key of a t-of-n teller set with the aggregated Feldman
/// commitments (commitments[0] == pk).
struct ThresholdPublicKey {
  GroupElement pk;
  std::vector<GroupElement> commitments;
  int threshold = 0;
  int tellers = 0;

  /// g^{share_i}, recomputed from the commitments.
  GroupElement verification_key(int index) const;
};

struct TellerKeyShare {
  int index = 0;
  Scalar share;
  std::vector<GroupElement> commitment_vector;
  GroupElement public_key;
  int threshold = 0;
  int tellers = 0;

  /// g^share == prod_j commitment_vector[j]^(index^j).
  bool feldman_check() const;
};

struct DkgResult {
  ThresholdPublicKey public_key;
  std::vector<TellerKeyShare> shares;
  /// Per-dealer commitment vectors, published so anyone can recompute the
  /// aggregate.
  std::vector<std::vector<GroupElement>> dealer_commitments;
};

/// Joint-Feldman key generation: every teller deals a Feldman VSS of a
/// random secret and the shares are summed.
DkgResult dkg(const ParamsPtr& params, int tellers, int threshold, Rng& rng);
ThresholdPublicKey aggregate_commitments(const std::vector<std::vector<GroupElement>>& dealer_commitments,
                                         int threshold, int tellers);

/// Lagrange coefficient at zero for `index` within `indices` (mod q).
Scalar lagrange_at_zero(const ParamsPtr& params, std::span<const int> indices, int index);
Scalar reconstruct_secret(std::span<const TellerKeyShare> shares);

struct DecryptionShare {
  int index = 0;
  GroupElement value;
  EqDlogProof proof;
};

DecryptionShare partial_decrypt(const TellerKeyShare& share, const Ciphertext& c, Rng& rng);
bool verify_decryption_share(const ThresholdPublicKey& key, const Ciphertext& c, const DecryptionShare& share);
/// Combines the first `threshold` shares after checking every supplied
/// proof. Throws ProofError naming the first bad index, InvalidArgument on
/// too few or duplicate shares.
GroupElement combine_shares(const ThresholdPublicKey& key, std::span<const DecryptionShare> shares,
                            const Ciphertext& c);

// ---- CCA2 layer (Cramer-Shoup over G) ---------------------------------------

struct Cca2PublicKey {
  GroupElement g1;
  GroupElement g2;
  GroupElement c;
  GroupElement d;
  GroupElement h;
};

struct Cca2SecretKey {
  Scalar x1, x2, y1, y2, z;
};

struct Cca2KeyPair {
  Cca2SecretKey sk;
  Cca2PublicKey pk;
};

struct Cca2Ciphertext {
  GroupElement u1;
  GroupElement u2;
  GroupElement e;
  GroupElement v;
};

/// Second generator with unknown discrete log, hashed from the parameters.
GroupElement derive_second_generator(const ParamsPtr& params);

Cca2KeyPair cca2_keygen(const ParamsPtr& params, Rng& rng);
/// `label` is bound into the integrity tag (e.g. the voter id).
Cca2Ciphertext cca2_encrypt(const Cca2PublicKey& pk, const GroupElement& m, Rng& rng, std::string_view label);
/// Throws ProofError if the integrity tag does not verify.
GroupElement cca2_decrypt(const Cca2KeyPair& key, const Cca2Ciphertext& ct, std::string_view label);

}  // namespace rcv
