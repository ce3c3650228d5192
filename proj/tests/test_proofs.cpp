#include <set>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "rcv/error.hpp"
#include "rcv/metrics.hpp"
#include "rcv/proofs.hpp"

using namespace rcv;
using rcv::test::elem;
using rcv::test::scal;

TEST_CASE("plaintext knowledge proof") {
  const auto params = test::group64();
  Rng rng("pok");
  const auto kp = keygen(params, rng);
  const Scalar r = Scalar::random(params, rng);
  const auto c = encrypt(kp.pk, elem(params, 4), r);
  const auto proof = prove_plaintext_knowledge(kp.pk, c, r, "election/voter-1", rng);
  CHECK(verify_plaintext_knowledge(kp.pk, c, proof, "election/voter-1"));
  CHECK_FALSE(verify_plaintext_knowledge(kp.pk, c, proof, "election/voter-2"));
  const auto other = encrypt(kp.pk, elem(params, 4), rng);
  CHECK_FALSE(verify_plaintext_knowledge(kp.pk, other, proof, "election/voter-1"));
  auto forged = proof;
  forged.response = forged.response + scal(params, 1);
  CHECK_FALSE(verify_plaintext_knowledge(kp.pk, c, forged, "election/voter-1"));
}

TEST_CASE("Chaum-Pedersen proofs, complete over the p=23 group") {
  const auto params = test::tiny_group();
  const auto g = GroupElement::generator(params);
  Rng rng("cp-tiny");
  for (long x = 0; x < 11; ++x) {
    for (long y = 1; y < 11; ++y) {
      const auto h = g.pow(scal(params, y));
      const EqDlogStatement st{g, g.pow(scal(params, x)), h, h.pow(scal(params, x))};
      const auto proof = prove_eq_dlog(st, scal(params, x), FiatShamir("t"), rng);
      CHECK(verify_eq_dlog(st, proof, FiatShamir("t")));
    }
  }
}

TEST_CASE("Chaum-Pedersen transcripts are domain separated") {
  const auto params = test::group64();
  const auto g = GroupElement::generator(params);
  Rng rng("cp-domain");
  for (int i = 0; i < 20; ++i) {
    const Scalar x = Scalar::random(params, rng);
    const auto h = g.pow(Scalar::random(params, rng));
    const EqDlogStatement st{g, g.pow(x), h, h.pow(x)};
    const auto proof = prove_eq_dlog(st, x, FiatShamir("t"), rng);
    CHECK(verify_eq_dlog(st, proof, FiatShamir("t")));
    CHECK_FALSE(verify_eq_dlog(st, proof, FiatShamir("other-domain")));
  }
}

TEST_CASE("disjunctive proofs") {
  const auto params = test::group64();
  const auto g = GroupElement::generator(params);
  Rng rng("or");
  const Scalar x = Scalar::random(params, rng);
  const auto h = g.pow(Scalar::random(params, rng));
  const EqDlogStatement truth{g, g.pow(x), h, h.pow(x)};
  const EqDlogStatement lie{g, g.pow(x), h, h.pow(x + scal(params, 1))};

  for (std::size_t real = 0; real < 3; ++real) {
    std::vector<std::vector<EqDlogStatement>> branches(3, std::vector<EqDlogStatement>{lie, lie});
    branches[real] = {truth, truth};
    const auto proof = prove_or(branches, real, {x, x}, FiatShamir("or"), rng);
    CHECK(verify_or(branches, proof, FiatShamir("or")));
    Scalar sum = Scalar::zero(params);
    for (const auto& b : proof.branches) sum += b.challenge;
    CHECK_FALSE(sum.is_zero());

    auto mutated = proof;
    mutated.branches[(real + 1) % 3].challenge = mutated.branches[(real + 1) % 3].challenge + scal(params, 1);
    CHECK_FALSE(verify_or(branches, mutated, FiatShamir("or")));
    CHECK_FALSE(verify_or(branches, proof, FiatShamir("or-2")));
  }

  // A prover claiming a false branch cannot satisfy it.
  std::vector<std::vector<EqDlogStatement>> all_false(2, std::vector<EqDlogStatement>{lie});
  const auto bogus = prove_or(all_false, 0, {x}, FiatShamir("or"), rng);
  CHECK_FALSE(verify_or(all_false, bogus, FiatShamir("or")));
}

namespace {

struct PetFixture {
  explicit PetFixture(ParamsPtr p, const char* seed) : params(std::move(p)), rng(seed), key(dkg(params, 3, 2, rng)) {}
  ParamsPtr params;
  Rng rng;
  DkgResult key;
};

}  // namespace

TEST_CASE("PET step blinding in the p=23 group") {
  PetFixture f(test::tiny_group(), "pet-step");
  const auto& pk = f.key.public_key.pk;
  const auto sk = reconstruct_secret(f.key.shares);
  const auto g = GroupElement::generator(f.params);
  const auto c = encrypt(pk, elem(f.params, 2), f.rng);

  SUBCASE("equal ciphertexts blind to an encryption of 1") {
    for (int i = 0; i < 20; ++i) {
      const auto step = pet_step(f.key.shares[0], c, c, f.rng);
      CHECK(decrypt(sk, step.output).is_identity());
      CHECK(verify_pet_step(step));
    }
  }

  SUBCASE("unequal plaintexts never blind to 1, and every non-identity value is reachable") {
    const auto c3 = encrypt(pk, elem(f.params, 3), f.rng);
    const auto quotient_plain = decrypt(sk, c / c3);
    std::set<long> reached;
    for (long z = 1; z < 11; ++z) {
      const auto blinded = (c / c3).pow(scal(f.params, z));
      const auto plain = decrypt(sk, blinded);
      CHECK_FALSE(plain.is_identity());
      CHECK(plain == quotient_plain.pow(scal(f.params, z)));
      reached.insert(plain.value().get_si());
    }
    CHECK(reached.size() == 10);
  }

  SUBCASE("forged blinding proof is rejected") {
    auto step = pet_step(f.key.shares[0], c, encrypt(pk, elem(f.params, 3), f.rng), f.rng);
    step.output.b = step.output.b * g;
    CHECK_FALSE(verify_pet_step(step));
  }

  SUBCASE("zero blinding is rejected") {
    const auto input = c / encrypt(pk, elem(f.params, 3), f.rng);
    const Ciphertext zero{GroupElement::identity(f.params), GroupElement::identity(f.params)};
    FiatShamir fs("rcv/pet-blind");
    fs.add("teller", std::uint64_t{1});
    const auto proof =
        prove_eq_dlog(EqDlogStatement{input.a, zero.a, input.b, zero.b}, scal(f.params, 0), fs, f.rng);
    const PetStep step{1, input, zero, proof};
    CHECK_FALSE(verify_pet_step(step));
  }
}

TEST_CASE("PET end to end") {
  PetFixture f(test::group64(), "pet-run");
  const auto& pk = f.key.public_key.pk;
  const auto m2 = elem(f.params, 2);
  const auto m3 = elem(f.params, 3);
  const auto c1 = encrypt(pk, m2, f.rng);
  const auto c2 = encrypt(pk, m2, f.rng);
  const auto c3 = encrypt(pk, m3, f.rng);

  reset_op_counters();
  const auto same = pet_run(f.key.public_key, f.key.shares, c1, c2, f.rng);
  CHECK(op_counters().pet_runs == 1);
  CHECK(same.verdict);
  CHECK(verify_pet(same, c1, c2, f.key.public_key));

  const auto diff = pet_run(f.key.public_key, f.key.shares, c1, c3, f.rng);
  CHECK_FALSE(diff.verdict);
  CHECK(verify_pet(diff, c1, c3, f.key.public_key));

  SUBCASE("mutated transcripts fail") {
    auto t = same;
    t.verdict = false;
    CHECK_FALSE(verify_pet(t, c1, c2, f.key.public_key));
    t = diff;
    t.verdict = true;
    CHECK_FALSE(verify_pet(t, c1, c3, f.key.public_key));
    t = same;
    t.steps[1].output.a = t.steps[1].output.a * GroupElement::generator(f.params);
    CHECK_FALSE(verify_pet(t, c1, c2, f.key.public_key));
    t = same;
    t.shares[0].value = t.shares[0].value * GroupElement::generator(f.params);
    CHECK_FALSE(verify_pet(t, c1, c2, f.key.public_key));
    t = same;
    t.plaintext = m2;
    CHECK_FALSE(verify_pet(t, c1, c2, f.key.public_key));
    t = same;
    t.steps.pop_back();
    t.steps.pop_back();
    CHECK_FALSE(verify_pet(t, c1, c2, f.key.public_key));
    CHECK_FALSE(verify_pet(same, c1, c3, f.key.public_key));
  }

  SUBCASE("cheating teller is named") {
    PetHooks hooks;
    hooks.tamper_step = [&](PetStep& step) {
      if (step.teller == 2) step.output.b = step.output.b * GroupElement::generator(f.params);
    };
    try {
      pet_run(f.key.public_key, f.key.shares, c1, c3, f.rng, hooks);
      FAIL("expected ProofError");
    } catch (const ProofError& e) {
      CHECK(e.party() == 2);
    }
  }

  SUBCASE("bad decryption shares are skipped") {
    PetHooks hooks;
    hooks.tamper_share = [&](DecryptionShare& s) {
      if (s.index == 1) s.value = s.value * GroupElement::generator(f.params);
    };
    const auto t = pet_run(f.key.public_key, f.key.shares, c1, c2, f.rng, hooks);
    CHECK(t.verdict);
    CHECK(t.shares.front().index == 2);
    CHECK(verify_pet(t, c1, c2, f.key.public_key));
  }
}

TEST_CASE("PET with chosen blinding exponents") {
  PetFixture f(test::tiny_group(), "pet-chosen");
  const auto& pk = f.key.public_key.pk;
  const auto c1 = encrypt(pk, elem(f.params, 2), f.rng);
  const auto c2 = encrypt(pk, elem(f.params, 3), f.rng);
  PetHooks hooks;
  hooks.blinding = [&](int teller) -> std::optional<Scalar> {
    if (teller == 1) return scal(f.params, 3);
    return std::nullopt;
  };
  const auto t = pet_run(f.key.public_key, f.key.shares, c1, c2, f.rng, hooks);
  CHECK(t.steps[0].output == (c1 / c2).pow(scal(f.params, 3)));
  CHECK_FALSE(t.verdict);
  CHECK(verify_pet(t, c1, c2, f.key.public_key));
  CHECK_THROWS_AS(pet_step(f.key.shares[0], c1 / c2, scal(f.params, 0), f.rng), InvalidArgument);
}
