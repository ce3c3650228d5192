#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "rcv/error.hpp"

using namespace rcv;
using rcv::test::elem;
using rcv::test::scal;

TEST_CASE("p=23 is accepted as a safe prime") {
  CHECK(test::trial_division_prime(23));
  CHECK(test::trial_division_prime(11));
  const auto params = test::tiny_group();
  CHECK(params->p == 23);
  CHECK(params->q == 11);
  CHECK(params->g == 4);
}

TEST_CASE("invalid parameter sets are rejected") {
  CHECK_THROWS_AS(make_params(29, 14, 4), InvalidArgument);  // q not prime
  CHECK_THROWS_AS(make_params(23, 11, 5), InvalidArgument);  // 5 is a non-residue
  CHECK_THROWS_AS(make_params(23, 11, 1), InvalidArgument);
  CHECK_THROWS_AS(make_params(25, 12, 4), InvalidArgument);
}

TEST_CASE("membership matches the enumerated squares mod 23") {
  const auto params = test::tiny_group();
  std::set<long> squares;
  for (long x = 1; x < 23; ++x) squares.insert(x * x % 23);
  CHECK(squares == std::set<long>{1, 2, 3, 4, 6, 8, 9, 12, 13, 16, 18});
  for (long x = 1; x < 23; ++x) {
    CHECK(is_member(*params, x) == (squares.count(x) == 1));
    CHECK(is_member(*params, x) == (test::naive_pow(x, 11, 23) == 1));
  }
  CHECK(is_member(*params, 2));
  CHECK_FALSE(is_member(*params, 5));
  CHECK(is_member(*params, 1));
  CHECK_THROWS_AS(elem(params, 5), InvalidArgument);
}

TEST_CASE("group operations on the p=23 fixture") {
  const auto params = test::tiny_group();
  const auto g = GroupElement::generator(params);
  CHECK(g.pow(scal(params, 0)).is_identity());
  CHECK(g.pow(mpz_class(11)).is_identity());
  CHECK((elem(params, 16) * elem(params, 16).inv()).is_identity());
  CHECK(g.pow(scal(params, 3)).value() == test::naive_pow(4, 3, 23));
  CHECK(g.pow(scal(params, 3)).value() == 18);
  CHECK(g.pow(mpz_class(-1)) == g.inv());
}

TEST_CASE("closure and exponent laws over random members") {
  const auto params = test::group64();
  Rng rng("group-props");
  const auto g = GroupElement::generator(params);
  CHECK(g.pow(params->q).is_identity());
  for (int i = 0; i < 50; ++i) {
    const Scalar a = Scalar::random(params, rng);
    const Scalar b = Scalar::random(params, rng);
    const auto x = g.pow(a);
    const auto y = g.pow(b);
    CHECK(is_member(*params, (x * y).value()));
    CHECK(is_member(*params, x.inv().value()));
    CHECK(is_member(*params, x.pow(b).value()));
    CHECK(x.pow(b) == g.pow(a * b));
    CHECK((x / y) * y == x);
  }
}

TEST_CASE("mixing parameter sets is an error") {
  const auto a = GroupElement::generator(test::tiny_group());
  const auto b = GroupElement::generator(test::group64());
  CHECK_THROWS_AS(a * b, InvalidArgument);
  CHECK_THROWS_AS(a.pow(Scalar(test::group64(), 2)), InvalidArgument);
  CHECK_THROWS_AS(Scalar(test::tiny_group(), 1) + Scalar(test::group64(), 1), InvalidArgument);
}

TEST_CASE("parameter generation") {
  SUBCASE("16-bit safe prime") {
    const auto params = generate_params(16, "s");
    CHECK(params->p >= (1 << 15));
    CHECK(params->p < (1 << 16));
    CHECK(params->p == 2 * params->q + 1);
    CHECK(test::trial_division_prime(params->p.get_si()));
    CHECK(test::trial_division_prime(params->q.get_si()));
  }
  SUBCASE("deterministic for a fixed seed") {
    const auto a = generate_params(64, "seed-x");
    const auto b = generate_params(64, "seed-x");
    CHECK(a->to_text() == b->to_text());
    CHECK(a->bits() == 64);
  }
  SUBCASE("too small or too tight a budget") {
    CHECK_THROWS_AS(generate_params(8, "s"), InvalidArgument);
    CHECK_THROWS_AS(generate_params(256, "s", 1), Error);
  }
}

TEST_CASE("canonical text round trip") {
  const auto params = test::group64();
  const auto back = params_from_text(params->to_text());
  CHECK(back->same_group(*params));
  CHECK(params_from_text("p=23;q=11;g=4")->p == 23);
  CHECK_THROWS_AS(params_from_text("p=23;q=11"), FormatError);
  CHECK_THROWS_AS(params_from_text("p=23;q=11;g=4;"), FormatError);
}

TEST_CASE("standard groups are safe-prime groups") {
  CHECK(standard_group_3072()->bits() == 3072);
  CHECK(standard_group_2048()->bits() == 2048);
}
