#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "rcv/elgamal.hpp"
#include "rcv/error.hpp"
#include "rcv/metrics.hpp"

using namespace rcv;
using rcv::test::elem;
using rcv::test::scal;

TEST_CASE("textbook values in the p=23 group") {
  const auto params = test::tiny_group();
  const auto kp = keypair_from_secret(scal(params, 3));
  CHECK(kp.pk.value() == 18);
  CHECK(keypair_from_secret(scal(params, 0)).pk.value() == 1);

  const auto pk = elem(params, 18);
  auto c = encrypt(pk, elem(params, 2), scal(params, 0));
  CHECK(c.a.value() == 1);
  CHECK(c.b.value() == 2);
  c = encrypt(pk, elem(params, 2), scal(params, 2));
  CHECK(c.a.value() == test::naive_pow(4, 2, 23));
  CHECK(c.b.value() == 2 * test::naive_pow(18, 2, 23) % 23);
  CHECK(c.a.value() == 16);
  CHECK(c.b.value() == 4);
  CHECK(decrypt(scal(params, 3), c).value() == 2);

  const auto one = encrypt(pk, elem(params, 1), scal(params, 1));
  CHECK(one.a.value() == 4);
  CHECK(one.b.value() == 18);
  CHECK(decrypt(scal(params, 7), Ciphertext{elem(params, 1), elem(params, 13)}).value() == 13);
}

TEST_CASE("keygen draws fresh keys") {
  const auto params = test::group64();
  Rng rng("keygen");
  const auto a = keygen(params, rng);
  const auto b = keygen(params, rng);
  CHECK_FALSE(a.sk == b.sk);
  CHECK(a.pk == GroupElement::generator(params).pow(a.sk));
}

TEST_CASE("roundtrip, homomorphism and re-encryption laws") {
  const auto params = test::group64();
  Rng rng("laws");
  const auto kp = keygen(params, rng);
  const auto g = GroupElement::generator(params);
  for (int i = 0; i < 30; ++i) {
    const auto m1 = g.pow(Scalar::random(params, rng));
    const auto m2 = g.pow(Scalar::random(params, rng));
    const auto c1 = encrypt(kp.pk, m1, rng);
    const auto c2 = encrypt(kp.pk, m2, rng);
    CHECK(decrypt(kp.sk, c1) == m1);
    CHECK(decrypt(kp.sk, homomorphic_mul(c1, c2)) == m1 * m2);
    const Scalar r = Scalar::random(params, rng);
    CHECK(decrypt(kp.sk, reencrypt(kp.pk, c1, r)) == m1);
  }
  const auto m = elem(params, 2);
  CHECK(reencrypt(kp.pk, encrypt(kp.pk, m, scal(params, 1)), scal(params, 2)) == encrypt(kp.pk, m, scal(params, 3)));
  const auto c = encrypt(kp.pk, m, rng);
  CHECK(reencrypt(kp.pk, c, Scalar::zero(params)) == c);
  const auto unit = encrypt(kp.pk, GroupElement::identity(params), rng);
  CHECK(decrypt(kp.sk, c * unit) == m);

  const auto e2 = encrypt(kp.pk, elem(params, 2), Scalar::zero(params));
  const auto e3 = encrypt(kp.pk, elem(params, 3), Scalar::zero(params));
  CHECK((e2 * e3).a.is_identity());
  CHECK((e2 * e3).b.value() == 6);
  CHECK(decrypt(kp.sk, encrypt(kp.pk, elem(params, 2), rng) * encrypt(kp.pk, elem(params, 3), rng)).value() == 6);
}

TEST_CASE("dkg: single teller holds the whole key") {
  const auto params = test::group64();
  Rng rng("dkg-1");
  const auto res = dkg(params, 1, 1, rng);
  REQUIRE(res.shares.size() == 1);
  CHECK(GroupElement::generator(params).pow(res.shares[0].share) == res.public_key.pk);
  CHECK(res.shares[0].feldman_check());
}

TEST_CASE("dkg: any two of three shares reconstruct the key (p=23, dlog by enumeration)") {
  const auto params = test::tiny_group();
  const auto g = GroupElement::generator(params);
  for (int trial = 0; trial < 20; ++trial) {
    Rng rng("dkg-3-2/" + std::to_string(trial));
    const auto res = dkg(params, 3, 2, rng);
    const long sk = test::brute_dlog(g, res.public_key.pk);
    REQUIRE(sk >= 0);
    for (const auto& s : res.shares) CHECK(s.feldman_check());
    const std::vector<TellerKeyShare> s12{res.shares[0], res.shares[1]};
    const std::vector<TellerKeyShare> s23{res.shares[1], res.shares[2]};
    const std::vector<TellerKeyShare> s13{res.shares[0], res.shares[2]};
    CHECK(reconstruct_secret(s12).value() == sk);
    CHECK(reconstruct_secret(s23).value() == sk);
    CHECK(reconstruct_secret(s13).value() == sk);

    // A lone share is consistent with every candidate secret: for each x a
    // degree-1 polynomial through (0, x) and (1, share_1) exists.
    const long s1 = res.shares[0].share.value().get_si();
    for (long x = 0; x < 11; ++x) {
      int polys = 0;
      for (long slope = 0; slope < 11; ++slope)
        if ((x + slope) % 11 == s1) ++polys;
      CHECK(polys == 1);
    }
  }
}

TEST_CASE("dkg rejects invalid (n, t)") {
  Rng rng("dkg-bad");
  CHECK_THROWS_AS(dkg(test::group64(), 2, 3, rng), InvalidArgument);
  CHECK_THROWS_AS(dkg(test::group64(), 3, 0, rng), InvalidArgument);
}

TEST_CASE("Feldman check catches a corrupted share") {
  Rng rng("feldman");
  auto res = dkg(test::group64(), 3, 2, rng);
  auto bad = res.shares[1];
  bad.share = bad.share + Scalar(bad.share.params(), 1);
  CHECK_FALSE(bad.feldman_check());
  CHECK(res.public_key.verification_key(2) == GroupElement::generator(test::group64()).pow(res.shares[1].share));
}

TEST_CASE("threshold decryption") {
  const auto params = test::group64();
  Rng rng("threshold");
  const auto res = dkg(params, 3, 2, rng);
  const auto m = GroupElement::generator(params).pow(Scalar::random(params, rng));
  const auto c = encrypt(res.public_key.pk, m, rng);

  SUBCASE("identity ciphertext gives identity share") {
    const Ciphertext trivial{GroupElement::identity(params), m};
    CHECK(partial_decrypt(res.shares[0], trivial, rng).value.is_identity());
  }

  SUBCASE("every qualifying subset combines to the plaintext") {
    const std::vector<std::vector<int>> subsets{{0, 1}, {1, 2}, {0, 2}, {0, 1, 2}, {2, 0}};
    for (const auto& subset : subsets) {
      std::vector<DecryptionShare> shares;
      for (int i : subset) shares.push_back(partial_decrypt(res.shares[static_cast<std::size_t>(i)], c, rng));
      CHECK(combine_shares(res.public_key, shares, c) == m);
      std::vector<TellerKeyShare> keys;
      for (int i : subset) keys.push_back(res.shares[static_cast<std::size_t>(i)]);
      CHECK(decrypt(reconstruct_secret(keys), c) == m);
    }
  }

  SUBCASE("proofs verify, tampered values do not") {
    auto share = partial_decrypt(res.shares[1], c, rng);
    CHECK(verify_decryption_share(res.public_key, c, share));
    share.value = share.value * GroupElement::generator(params);
    CHECK_FALSE(verify_decryption_share(res.public_key, c, share));
  }

  SUBCASE("too few shares") {
    std::vector<DecryptionShare> shares{partial_decrypt(res.shares[0], c, rng)};
    CHECK_THROWS_AS(combine_shares(res.public_key, shares, c), InvalidArgument);
  }

  SUBCASE("duplicate indices") {
    const auto s = partial_decrypt(res.shares[0], c, rng);
    std::vector<DecryptionShare> shares{s, s};
    CHECK_THROWS_AS(combine_shares(res.public_key, shares, c), InvalidArgument);
  }

  SUBCASE("forged share names the culprit") {
    std::vector<DecryptionShare> shares{partial_decrypt(res.shares[0], c, rng), partial_decrypt(res.shares[2], c, rng)};
    shares[1].value = shares[1].value * GroupElement::generator(params);
    try {
      combine_shares(res.public_key, shares, c);
      FAIL("expected ProofError");
    } catch (const ProofError& e) {
      CHECK(e.party() == 3);
    }
  }
}

TEST_CASE("Cramer-Shoup layer") {
  const auto params = test::group64();
  Rng rng("cca2");
  const auto key = cca2_keygen(params, rng);
  const auto m = GroupElement::generator(params).pow(Scalar::random(params, rng));

  const auto ct = cca2_encrypt(key.pk, m, rng, "voter-1");
  CHECK(cca2_decrypt(key, ct, "voter-1") == m);

  const auto ct2 = cca2_encrypt(key.pk, m, rng, "voter-1");
  CHECK(ct2.u1 != ct.u1);
  CHECK(ct2.e != ct.e);

  const auto g = GroupElement::generator(params);
  for (int which = 0; which < 4; ++which) {
    auto mauled = ct;
    GroupElement* fields[] = {&mauled.u1, &mauled.u2, &mauled.e, &mauled.v};
    *fields[which] = *fields[which] * g;
    CHECK_THROWS_AS(cca2_decrypt(key, mauled, "voter-1"), ProofError);
  }
  CHECK_THROWS_AS(cca2_decrypt(key, ct, "voter-2"), ProofError);

  reset_op_counters();
  (void)cca2_decrypt(key, ct, "voter-1");
  CHECK(op_counters().cca2_decryptions == 1);
}
