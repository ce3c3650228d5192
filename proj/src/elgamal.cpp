#include "rcv/elgamal.hpp"

#include <algorithm>
#include <set>

#include "rcv/error.hpp"
#include "rcv/metrics.hpp"

namespace rcv {

KeyPair keygen(const ParamsPtr& params, Rng& rng) { return keypair_from_secret(Scalar::random(params, rng)); }

KeyPair keypair_from_secret(const Scalar& sk) {
  return KeyPair{sk, GroupElement::generator(sk.params()).pow(sk)};
}

Ciphertext encrypt(const GroupElement& pk, const GroupElement& m, const Scalar& r) {
  const auto g = GroupElement::generator(pk.params());
  return Ciphertext{g.pow(r), m * pk.pow(r)};
}

Ciphertext encrypt(const GroupElement& pk, const GroupElement& m, Rng& rng) {
  return encrypt(pk, m, Scalar::random(pk.params(), rng));
}

Ciphertext encrypt_deterministic(const GroupElement& pk, const GroupElement& m) {
  return encrypt(pk, m, Scalar(pk.params(), 1));
}

GroupElement decrypt(const Scalar& sk, const Ciphertext& c) { return c.b / c.a.pow(sk); }

Ciphertext homomorphic_mul(const Ciphertext& c1, const Ciphertext& c2) { return c1 * c2; }

Ciphertext reencrypt(const GroupElement& pk, const Ciphertext& c, const Scalar& r) {
  const auto g = GroupElement::generator(pk.params());
  return Ciphertext{c.a * g.pow(r), c.b * pk.pow(r)};
}

// ---- threshold --------------------------------------------------------------

namespace {

GroupElement feldman_eval(const std::vector<GroupElement>& commitments, int index) {
  const auto& params = commitments.front().params();
  GroupElement acc = GroupElement::identity(params);
  mpz_class power = 1;
  for (const auto& c : commitments) {
    acc *= c.pow(power);
    power *= index;
  }
  return acc;
}

Scalar poly_eval(const std::vector<Scalar>& coeffs, int x) {
  const auto& params = coeffs.front().params();
  Scalar acc = Scalar::zero(params);
  const Scalar sx(params, x);
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * sx + *it;
  return acc;
}

FiatShamir share_transcript(const Ciphertext& c, int index) {
  FiatShamir fs("rcv/decryption-share");
  fs.add("index", static_cast<std::uint64_t>(index)).add("a", c.a.value()).add("b", c.b.value());
  return fs;
}

}  // namespace

GroupElement ThresholdPublicKey::verification_key(int index) const { return feldman_eval(commitments, index); }

bool TellerKeyShare::feldman_check() const {
  if (commitment_vector.empty()) return false;
  return GroupElement::generator(share.params()).pow(share) == feldman_eval(commitment_vector, index);
}

ThresholdPublicKey aggregate_commitments(const std::vector<std::vector<GroupElement>>& dealer_commitments,
                                         int threshold, int tellers) {
  if (dealer_commitments.empty()) throw InvalidArgument("no dealers");
  std::vector<GroupElement> agg = dealer_commitments.front();
  for (std::size_t d = 1; d < dealer_commitments.size(); ++d) {
    if (dealer_commitments[d].size() != agg.size()) throw InvalidArgument("commitment vectors differ in length");
    for (std::size_t j = 0; j < agg.size(); ++j) agg[j] *= dealer_commitments[d][j];
  }
  if (static_cast<int>(agg.size()) != threshold) throw InvalidArgument("commitment length != threshold");
  return ThresholdPublicKey{agg.front(), agg, threshold, tellers};
}

DkgResult dkg(const ParamsPtr& params, int tellers, int threshold, Rng& rng) {
  if (threshold < 1 || tellers < threshold) throw InvalidArgument("need 1 <= t <= n");
  const auto g = GroupElement::generator(params);

  DkgResult out{ThresholdPublicKey{g, {}, threshold, tellers}, {}, {}};
  std::vector<Scalar> summed(static_cast<std::size_t>(tellers), Scalar::zero(params));
  for (int dealer = 1; dealer <= tellers; ++dealer) {
    std::vector<Scalar> coeffs;
    std::vector<GroupElement> commitments;
    for (int j = 0; j < threshold; ++j) {
      coeffs.push_back(Scalar::random(params, rng));
      commitments.push_back(g.pow(coeffs.back()));
    }
    for (int i = 1; i <= tellers; ++i) {
      const Scalar dealt = poly_eval(coeffs, i);
      // Receiving teller's Feldman check on the dealt share.
      if (g.pow(dealt) != feldman_eval(commitments, i))
        throw ProofError("dealt share failed the Feldman check", dealer);
      summed[static_cast<std::size_t>(i - 1)] += dealt;
    }
    out.dealer_commitments.push_back(std::move(commitments));
  }
  out.public_key = aggregate_commitments(out.dealer_commitments, threshold, tellers);
  for (int i = 1; i <= tellers; ++i) {
    out.shares.push_back(TellerKeyShare{i, summed[static_cast<std::size_t>(i - 1)], out.public_key.commitments,
                                        out.public_key.pk, threshold, tellers});
  }
  return out;
}

Scalar lagrange_at_zero(const ParamsPtr& params, std::span<const int> indices, int index) {
  Scalar num(params, 1);
  Scalar den(params, 1);
  for (int j : indices) {
    if (j == index) continue;
    num = num * Scalar(params, j);
    den = den * Scalar(params, j - index);
  }
  return num * den.inverse();
}

Scalar reconstruct_secret(std::span<const TellerKeyShare> shares) {
  if (shares.empty()) throw InvalidArgument("no shares");
  const auto& params = shares.front().share.params();
  std::vector<int> indices;
  for (const auto& s : shares) indices.push_back(s.index);
  if (std::set<int>(indices.begin(), indices.end()).size() != indices.size())
    throw InvalidArgument("duplicate share index");
  Scalar acc = Scalar::zero(params);
  for (const auto& s : shares) acc += lagrange_at_zero(params, indices, s.index) * s.share;
  return acc;
}

DecryptionShare partial_decrypt(const TellerKeyShare& share, const Ciphertext& c, Rng& rng) {
  const auto& params = share.share.params();
  const auto g = GroupElement::generator(params);
  const GroupElement value = c.a.pow(share.share);
  const EqDlogStatement st{g, g.pow(share.share), c.a, value};
  return DecryptionShare{share.index, value, prove_eq_dlog(st, share.share, share_transcript(c, share.index), rng)};
}

bool verify_decryption_share(const ThresholdPublicKey& key, const Ciphertext& c, const DecryptionShare& share) {
  if (share.index < 1 || share.index > key.tellers) return false;
  const auto g = GroupElement::generator(key.pk.params());
  const EqDlogStatement st{g, key.verification_key(share.index), c.a, share.value};
  return verify_eq_dlog(st, share.proof, share_transcript(c, share.index));
}

GroupElement combine_shares(const ThresholdPublicKey& key, std::span<const DecryptionShare> shares,
                            const Ciphertext& c) {
  std::set<int> seen;
  for (const auto& s : shares) {
    if (!seen.insert(s.index).second) throw InvalidArgument("duplicate decryption share index");
    if (!verify_decryption_share(key, c, s)) throw ProofError("invalid decryption share", s.index);
  }
  if (static_cast<int>(shares.size()) < key.threshold) throw InvalidArgument("not enough decryption shares");
  const auto used = shares.first(static_cast<std::size_t>(key.threshold));
  std::vector<int> indices;
  for (const auto& s : used) indices.push_back(s.index);
  const auto& params = key.pk.params();
  GroupElement mask = GroupElement::identity(params);
  for (const auto& s : used) mask *= s.value.pow(lagrange_at_zero(params, indices, s.index));
  return c.b / mask;
}

// ---- Cramer-Shoup -----------------------------------------------------------

GroupElement derive_second_generator(const ParamsPtr& params) {
  for (std::uint64_t ctr = 0;; ++ctr) {
    FiatShamir fs("rcv/second-generator");
    fs.add("p", params->p).add("ctr", ctr);
    mpz_class x = fs.challenge(params->p);
    x = x * x % params->p;
    if (x > 1 && x != params->g) return GroupElement::from_integer(params, x);
  }
}

namespace {

Scalar cs_hash(const Cca2PublicKey& pk, const GroupElement& u1, const GroupElement& u2, const GroupElement& e,
               std::string_view label) {
  FiatShamir fs("rcv/cramer-shoup");
  fs.add("label", label).add("h", pk.h.value()).add("u1", u1.value()).add("u2", u2.value()).add("e", e.value());
  return Scalar(u1.params(), fs.challenge(u1.params()->q));
}

}  // namespace

Cca2KeyPair cca2_keygen(const ParamsPtr& params, Rng& rng) {
  const auto g1 = GroupElement::generator(params);
  const auto g2 = derive_second_generator(params);
  Cca2SecretKey sk{Scalar::random(params, rng), Scalar::random(params, rng), Scalar::random(params, rng),
                   Scalar::random(params, rng), Scalar::random(params, rng)};
  Cca2PublicKey pk{g1, g2, g1.pow(sk.x1) * g2.pow(sk.x2), g1.pow(sk.y1) * g2.pow(sk.y2), g1.pow(sk.z)};
  return Cca2KeyPair{std::move(sk), std::move(pk)};
}

Cca2Ciphertext cca2_encrypt(const Cca2PublicKey& pk, const GroupElement& m, Rng& rng, std::string_view label) {
  const Scalar r = Scalar::random(m.params(), rng);
  const auto u1 = pk.g1.pow(r);
  const auto u2 = pk.g2.pow(r);
  const auto e = pk.h.pow(r) * m;
  const Scalar alpha = cs_hash(pk, u1, u2, e, label);
  const auto v = pk.c.pow(r) * pk.d.pow(r * alpha);
  return Cca2Ciphertext{u1, u2, e, v};
}

GroupElement cca2_decrypt(const Cca2KeyPair& key, const Cca2Ciphertext& ct, std::string_view label) {
  ++op_counters().cca2_decryptions;
  const auto& sk = key.sk;
  const Scalar alpha = cs_hash(key.pk, ct.u1, ct.u2, ct.e, label);
  const auto expect = ct.u1.pow(sk.x1 + sk.y1 * alpha) * ct.u2.pow(sk.x2 + sk.y2 * alpha);
  if (expect != ct.v) throw ProofError("CCA2 ciphertext failed its integrity check");
  return ct.e / ct.u1.pow(sk.z);
}

}  // namespace rcv
