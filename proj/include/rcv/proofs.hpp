#pragma once

#include <string_view>

#include "rcv/elgamal.hpp"
#include "rcv/pet.hpp"
#include "rcv/sigma.hpp"

namespace rcv {

/// Proof of knowledge of the randomness r of c = (g^r, m pk^r), which
/// determines the plaintext. `context` (election and voter id) is bound
/// into the challenge so a proof cannot be replayed for another ballot.
SchnorrProof prove_plaintext_knowledge(const GroupElement& pk, const Ciphertext& c, const Scalar& r,
                                       std::string_view context, Rng& rng);
bool verify_plaintext_knowledge(const GroupElement& pk, const Ciphertext& c, const SchnorrProof& proof,
                                std::string_view context);

}  // namespace rcv
