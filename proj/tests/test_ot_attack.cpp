#include <doctest.h>

#include "fixtures.hpp"
#include "rcv/error.hpp"
#include "rcv/ot_attack.hpp"

using namespace rcv;

namespace {

struct Fixture {
  ParamsPtr params = test::group256();
  Rng rng{"ot-fixture"};
  OtScheme scheme = ot_setup(params, 2, 2, rng);
};

}  // namespace

TEST_CASE("honest OT run returns the table codes") {
  Fixture f;
  CHECK(f.scheme.gamma[0].value() == 2);
  CHECK(f.scheme.gamma[1].value() < f.params->p);
  for (int s1 = 1; s1 <= 2; ++s1) {
    for (int s2 = 1; s2 <= 2; ++s2) {
      const std::vector<int> s{s1, s2};
      const auto q = ot_honest_query(f.scheme, s, f.rng);
      CHECK(ot_check_query(f.scheme, q.query));
      const auto resp = ot_respond(f.scheme, q.query, Scalar::random_nonzero(f.params, f.rng));
      const auto codes = ot_extract_codes(f.scheme, resp, q.r, s);
      CHECK(codes[0] == f.scheme.codes[static_cast<std::size_t>(s1 - 1)]);
      CHECK(codes[1] == f.scheme.codes[static_cast<std::size_t>(s2 - 1)]);
      const auto plain = decrypt(f.scheme.election.sk, ot_implied_ciphertext(q.query));
      CHECK(plain == f.scheme.gamma[static_cast<std::size_t>(s1 - 1)] * f.scheme.gamma[static_cast<std::size_t>(s2 - 1)]);
      const auto tally = ot_tally_decode(f.scheme, plain);
      REQUIRE(tally);
      CHECK(*tally == std::vector<int>{std::min(s1, s2), std::max(s1, s2)});
    }
  }
}

TEST_CASE("wrong randomness yields garbage codes") {
  Fixture f;
  const auto q = ot_honest_query(f.scheme, {1, 2}, f.rng);
  const auto resp = ot_respond(f.scheme, q.query, Scalar::random_nonzero(f.params, f.rng));
  auto r = q.r;
  r[0] += Scalar(f.params, 1);
  const auto codes = ot_extract_codes(f.scheme, resp, r, {1, 2});
  CHECK(codes[0] != f.scheme.codes[0]);
  CHECK(codes[1] == f.scheme.codes[1]);
}

TEST_CASE("the scheme's proof check rejects tampered queries") {
  Fixture f;
  auto q = ot_honest_query(f.scheme, {2, 1}, f.rng).query;
  CHECK(ot_check_query(f.scheme, q));
  auto bad = q;
  bad.b = bad.b * GroupElement::generator(f.params);
  CHECK_FALSE(ot_check_query(f.scheme, bad));
  bad = q;
  bad.a.pop_back();
  CHECK_FALSE(ot_check_query(f.scheme, bad));
  CHECK_THROWS_AS(ot_honest_query(f.scheme, {1, 3}, f.rng), InvalidArgument);
  CHECK_THROWS_AS(ot_honest_query(f.scheme, {1}, f.rng), InvalidArgument);
}

TEST_CASE("malicious query passes the check and leaks the honest codes") {
  Fixture f;
  for (int s1 = 1; s1 <= 2; ++s1) {
    for (int s2 = 1; s2 <= 2; ++s2) {
      const std::vector<int> s{s1, s2};
      const auto q = ot_malicious_query(f.scheme, s, f.rng);
      CHECK(ot_check_query(f.scheme, q.query));
      const auto g1 = f.scheme.gamma[static_cast<std::size_t>(s1 - 1)];
      const auto g2 = f.scheme.gamma[static_cast<std::size_t>(s2 - 1)];
      const auto plain = decrypt(f.scheme.election.sk, ot_implied_ciphertext(q.query));
      CHECK(plain == g1.pow(mpz_class(8)) * g2);
      CHECK_FALSE(ot_tally_decode(f.scheme, plain));
      const auto resp = ot_respond(f.scheme, q.query, Scalar::random_nonzero(f.params, f.rng));
      const auto codes = ot_malicious_extract(f.scheme, resp, q.r, s);
      CHECK(codes[0] == f.scheme.codes[static_cast<std::size_t>(s1 - 1)]);
      CHECK(codes[1] == f.scheme.codes[static_cast<std::size_t>(s2 - 1)]);
      // The honest extraction on the malicious response gets the second code wrong.
      CHECK(ot_extract_codes(f.scheme, resp, q.r, s)[1] != codes[1]);
    }
  }
}

TEST_CASE("countermeasure accepts honest queries and rejects malformed ones") {
  Fixture f;
  for (int s1 = 1; s1 <= 2; ++s1) {
    for (int s2 = 1; s2 <= 2; ++s2) {
      const auto res = ot_countermeasure_check(f.scheme, ot_honest_query(f.scheme, {s1, s2}, f.rng).query);
      CHECK(res.accepted);
      CHECK(res.branches == 4);
    }
  }
  for (int e = 1; e <= 8; ++e) {
    CAPTURE(e);
    const auto q = ot_malicious_query(f.scheme, {1, 2}, f.rng, e);
    CHECK(ot_check_query(f.scheme, q.query));
    CHECK_FALSE(ot_countermeasure_check(f.scheme, q.query).accepted);
  }
  auto q = ot_honest_query(f.scheme, {1, 2}, f.rng).query;
  q.b_parts.pop_back();
  CHECK_FALSE(ot_countermeasure_check(f.scheme, q).accepted);

  SUBCASE("branch count grows as k times n") {
    Rng rng("ot-scale");
    const auto big = ot_setup(f.params, 5, 3, rng);
    const auto res = ot_countermeasure_check(big, ot_honest_query(big, {5, 1, 3}, rng).query);
    CHECK(res.accepted);
    CHECK(res.branches == 15);
  }
}

TEST_CASE("attack demo is deterministic under the seed") {
  const auto d = run_attack_demo(test::group256(), "demo");
  CHECK(d.honest_checks_pass);
  CHECK(d.malicious_checks_pass);
  CHECK(d.honest_codes == d.expected_codes);
  CHECK(d.malicious_codes == d.expected_codes);
  CHECK(d.honest_tally);
  CHECK_FALSE(d.malicious_tally);
  CHECK(d.attack_succeeds());
  CHECK(d.countermeasure_accepts_honest);
  CHECK(d.countermeasure_rejects_malicious);
  CHECK(d.countermeasure_branches == 4);
  CHECK(d.to_json() == run_attack_demo(test::group256(), "demo").to_json());
  CHECK(d.to_json() != run_attack_demo(test::group256(), "other").to_json());
  CHECK(d.to_text().find("attack succeeds") != std::string::npos);
}
