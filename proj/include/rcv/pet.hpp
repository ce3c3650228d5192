#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "rcv/elgamal.hpp"

namespace rcv {

/// One teller's blinding step: output = input^z for a secret non-zero z.
struct PetStep {
  int teller = 0;
  Ciphertext input;
  Ciphertext output;
  EqDlogProof proof;
};

/// Publicly verifiable plaintext-equivalence test. Tellers blind the
/// quotient c / c' one after another (the exponents multiply, so the
/// combined blinding is non-zero whenever every step is), then a threshold
/// of them decrypt the result.
struct PetTranscript {
  Ciphertext quotient;
  std::vector<PetStep> steps;
  std::vector<DecryptionShare> shares;
  GroupElement plaintext;
  bool verdict = false;
};

PetStep pet_step(const TellerKeyShare& share, const Ciphertext& input, Rng& rng);
/// Step with a chosen exponent; z must be non-zero.
PetStep pet_step(const TellerKeyShare& share, const Ciphertext& input, const Scalar& z, Rng& rng);
/// Convenience form blinding c / c' directly.
PetStep pet_step(const TellerKeyShare& share, const Ciphertext& c, const Ciphertext& c_prime, Rng& rng);
bool verify_pet_step(const PetStep& step);

struct PetHooks {
  /// Chooses a teller's blinding exponent instead of drawing it.
  std::function<std::optional<Scalar>(int teller)> blinding;
  /// Called on every step before it is checked; lets tests and the
  /// harness model actively cheating tellers.
  std::function<void(PetStep&)> tamper_step;
  std::function<void(DecryptionShare&)> tamper_share;
};

/// Runs the full test with every supplied teller blinding and the first
/// `threshold` valid decryption shares combining. Throws ProofError naming
/// the teller whose blinding proof fails.
PetTranscript pet_run(const ThresholdPublicKey& key, std::span<const TellerKeyShare> tellers, const Ciphertext& c,
                      const Ciphertext& c_prime, Rng& rng, const PetHooks& hooks = {});

bool verify_pet(const PetTranscript& transcript, const Ciphertext& c, const Ciphertext& c_prime,
                const ThresholdPublicKey& key);

}  // namespace rcv
