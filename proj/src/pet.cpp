#include "rcv/pet.hpp"

#include <set>

#include "rcv/error.hpp"
#include "rcv/metrics.hpp"

namespace rcv {

namespace {

FiatShamir step_transcript(int teller) {
  FiatShamir fs("rcv/pet-blind");
  fs.add("teller", static_cast<std::uint64_t>(teller));
  return fs;
}

EqDlogStatement step_statement(const PetStep& step) {
  return EqDlogStatement{step.input.a, step.output.a, step.input.b, step.output.b};
}

// x^z == 1 with x != 1 only when z == 0 (prime order), which would force
// a positive verdict.
bool trivially_blinded(const PetStep& step) {
  return (!step.input.a.is_identity() && step.output.a.is_identity()) ||
         (!step.input.b.is_identity() && step.output.b.is_identity());
}

}  // namespace

PetStep pet_step(const TellerKeyShare& share, const Ciphertext& input, Rng& rng) {
  return pet_step(share, input, Scalar::random_nonzero(share.share.params(), rng), rng);
}

PetStep pet_step(const TellerKeyShare& share, const Ciphertext& input, const Scalar& z, Rng& rng) {
  if (z.is_zero()) throw InvalidArgument("PET blinding exponent must be non-zero");
  const Ciphertext output = input.pow(z);
  const EqDlogStatement st{input.a, output.a, input.b, output.b};
  return PetStep{share.index, input, output, prove_eq_dlog(st, z, step_transcript(share.index), rng)};
}

PetStep pet_step(const TellerKeyShare& share, const Ciphertext& c, const Ciphertext& c_prime, Rng& rng) {
  return pet_step(share, c / c_prime, rng);
}

bool verify_pet_step(const PetStep& step) {
  if (trivially_blinded(step)) return false;
  return verify_eq_dlog(step_statement(step), step.proof, step_transcript(step.teller));
}

PetTranscript pet_run(const ThresholdPublicKey& key, std::span<const TellerKeyShare> tellers, const Ciphertext& c,
                      const Ciphertext& c_prime, Rng& rng, const PetHooks& hooks) {
  ++op_counters().pet_runs;
  if (static_cast<int>(tellers.size()) < key.threshold) throw InvalidArgument("not enough tellers for the PET");
  const Ciphertext quotient = c / c_prime;
  PetTranscript out{quotient, {}, {}, GroupElement::identity(key.pk.params()), false};

  Ciphertext current = quotient;
  for (const auto& teller : tellers) {
    const auto z = hooks.blinding ? hooks.blinding(teller.index) : std::nullopt;
    PetStep step = z ? pet_step(teller, current, *z, rng) : pet_step(teller, current, rng);
    if (hooks.tamper_step) hooks.tamper_step(step);
    if (step.input != current || !verify_pet_step(step))
      throw ProofError("PET blinding proof rejected", teller.index);
    current = step.output;
    out.steps.push_back(std::move(step));
  }

  for (const auto& teller : tellers) {
    if (static_cast<int>(out.shares.size()) == key.threshold) break;
    DecryptionShare share = partial_decrypt(teller, current, rng);
    if (hooks.tamper_share) hooks.tamper_share(share);
    if (!verify_decryption_share(key, current, share)) continue;
    out.shares.push_back(std::move(share));
  }
  out.plaintext = combine_shares(key, out.shares, current);
  out.verdict = out.plaintext.is_identity();
  return out;
}

bool verify_pet(const PetTranscript& transcript, const Ciphertext& c, const Ciphertext& c_prime,
                const ThresholdPublicKey& key) {
  if (transcript.quotient != c / c_prime) return false;
  if (static_cast<int>(transcript.steps.size()) < key.threshold) return false;
  std::set<int> blinders;
  Ciphertext current = transcript.quotient;
  for (const auto& step : transcript.steps) {
    if (step.teller < 1 || step.teller > key.tellers || !blinders.insert(step.teller).second) return false;
    if (step.input != current || !verify_pet_step(step)) return false;
    current = step.output;
  }
  try {
    if (static_cast<int>(transcript.shares.size()) != key.threshold) return false;
    const GroupElement plain = combine_shares(key, transcript.shares, current);
    return plain == transcript.plaintext && transcript.verdict == plain.is_identity();
  } catch (const Error&) {
    return false;
  }
}

}  // namespace rcv
