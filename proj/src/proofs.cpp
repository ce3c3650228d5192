#include "rcv/proofs.hpp"

namespace rcv {

namespace {

FiatShamir pok_transcript(const GroupElement& pk, const Ciphertext& c, std::string_view context) {
  FiatShamir fs("rcv/plaintext-knowledge");
  fs.add("context", context).add("pk", pk.value()).add("a", c.a.value()).add("b", c.b.value());
  return fs;
}

}  // namespace

SchnorrProof prove_plaintext_knowledge(const GroupElement& pk, const Ciphertext& c, const Scalar& r,
                                       std::string_view context, Rng& rng) {
  return prove_dlog(GroupElement::generator(pk.params()), c.a, r, pok_transcript(pk, c, context), rng);
}

bool verify_plaintext_knowledge(const GroupElement& pk, const Ciphertext& c, const SchnorrProof& proof,
                                std::string_view context) {
  return verify_dlog(GroupElement::generator(pk.params()), c.a, proof, pok_transcript(pk, c, context));
}

}  // namespace rcv
