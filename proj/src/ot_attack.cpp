#include "rcv/ot_attack.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "rcv/encoding.hpp"
#include "rcv/error.hpp"
#include "rcv/proofs.hpp"

namespace rcv {

namespace {

constexpr std::string_view kQueryContext = "ot-query";

void check_choice(const OtScheme& scheme, const std::vector<int>& choice) {
  if (static_cast<int>(choice.size()) != scheme.selections) throw InvalidArgument("choice must have k entries");
  for (int s : choice)
    if (s < 1 || s > scheme.candidates()) throw InvalidArgument("candidate index out of range");
}

FiatShamir component_transcript(const OtScheme& scheme, std::size_t j) {
  FiatShamir fs("rcv/ot-component");
  fs.add("y", scheme.election.pk.value()).add("j", static_cast<std::uint64_t>(j));
  return fs;
}

// Branch i: (b_j, a_j / Gamma(i)) = (g^r, y^r).
std::vector<std::vector<EqDlogStatement>> component_branches(const OtScheme& scheme, const GroupElement& b_j,
                                                             const GroupElement& a_j) {
  std::vector<std::vector<EqDlogStatement>> br;
  const auto g = GroupElement::generator(scheme.params);
  for (const auto& gamma : scheme.gamma) br.push_back({EqDlogStatement{g, b_j, scheme.election.pk, a_j / gamma}});
  return br;
}

OtQueryResult build_query(const OtScheme& scheme, const std::vector<GroupElement>& plaintexts,
                          const std::vector<int>& claimed, Rng& rng) {
  const auto g = GroupElement::generator(scheme.params);
  const auto& y = scheme.election.pk;
  std::vector<Scalar> r;
  std::vector<GroupElement> a, b_parts;
  Scalar r_sum = Scalar::zero(scheme.params);
  for (const auto& m : plaintexts) {
    r.push_back(Scalar::random(scheme.params, rng));
    a.push_back(m * y.pow(r.back()));
    b_parts.push_back(g.pow(r.back()));
    r_sum += r.back();
  }
  const GroupElement b = g.pow(r_sum);
  GroupElement product = GroupElement::identity(scheme.params);
  for (const auto& x : a) product *= x;
  const auto pok = prove_plaintext_knowledge(y, Ciphertext{b, product}, r_sum, kQueryContext, rng);
  std::vector<OrProof> proofs;
  for (std::size_t j = 0; j < a.size(); ++j) {
    proofs.push_back(prove_or(component_branches(scheme, b_parts[j], a[j]), static_cast<std::size_t>(claimed[j] - 1),
                              {r[j]}, component_transcript(scheme, j), rng));
  }
  return OtQueryResult{OtQuery{std::move(a), b, pok, std::move(b_parts), std::move(proofs)}, std::move(r)};
}

GroupElement unblind(const OtResponse& resp, std::size_t j, const Scalar& r) {
  return resp.a_alpha.at(j) / resp.y_alpha.pow(r);
}

Digest xor_digest(const Digest& x, const Digest& y) {
  Digest out;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] ^ y[i];
  return out;
}

std::string choice_text(const std::optional<std::vector<int>>& c) {
  if (!c) return "rejected";
  std::ostringstream out;
  out << "(";
  for (std::size_t i = 0; i < c->size(); ++i) out << (i ? "," : "") << (*c)[i];
  out << ")";
  return out.str();
}

std::string short_hex(const Digest& d) { return to_hex(d).substr(0, 16); }

}  // namespace

OtScheme ot_setup(const ParamsPtr& params, int candidates, int selections, Rng& rng) {
  if (candidates < 1 || selections < 1) throw InvalidArgument("need at least one candidate and one selection");
  OtScheme s{params, {}, keygen(params, rng), {}, selections};
  for (const auto& p : qr_primes(*params, static_cast<std::size_t>(candidates)))
    s.gamma.push_back(GroupElement::from_integer(params, p));
  for (int i = 0; i < candidates; ++i) {
    Digest code;
    rng.fill(code);
    s.codes.push_back(code);
  }
  return s;
}

OtQueryResult ot_honest_query(const OtScheme& scheme, const std::vector<int>& choice, Rng& rng) {
  check_choice(scheme, choice);
  std::vector<GroupElement> m;
  for (int s : choice) m.push_back(scheme.gamma[static_cast<std::size_t>(s - 1)]);
  return build_query(scheme, m, choice, rng);
}

OtQueryResult ot_malicious_query(const OtScheme& scheme, const std::vector<int>& choice, Rng& rng, int exponent) {
  check_choice(scheme, choice);
  if (scheme.selections < 2) throw InvalidArgument("the attack needs two selections");
  std::vector<GroupElement> m;
  for (int s : choice) m.push_back(scheme.gamma[static_cast<std::size_t>(s - 1)]);
  m[1] = m[0].pow(mpz_class(exponent)) * m[1];
  return build_query(scheme, m, choice, rng);
}

Ciphertext ot_implied_ciphertext(const OtQuery& q) {
  GroupElement product = GroupElement::identity(q.b.params());
  for (const auto& x : q.a) product *= x;
  return Ciphertext{q.b, product};
}

bool ot_check_query(const OtScheme& scheme, const OtQuery& q) {
  if (static_cast<int>(q.a.size()) != scheme.selections) return false;
  return verify_plaintext_knowledge(scheme.election.pk, ot_implied_ciphertext(q), q.pok, kQueryContext);
}

OtResponse ot_respond(const OtScheme& scheme, const OtQuery& q, const Scalar& alpha) {
  OtResponse r{{}, scheme.election.pk.pow(alpha), {}};
  for (const auto& a : q.a) r.a_alpha.push_back(a.pow(alpha));
  for (std::size_t i = 0; i < scheme.gamma.size(); ++i)
    r.masked.push_back(xor_digest(scheme.codes[i], ot_mask(scheme.gamma[i].pow(alpha))));
  return r;
}

Digest ot_mask(const GroupElement& x) { return FiatShamir("rcv/ot-mask").add("x", x.value()).digest(); }

std::vector<Digest> ot_extract_codes(const OtScheme& scheme, const OtResponse& resp, const std::vector<Scalar>& r,
                                     const std::vector<int>& choice) {
  check_choice(scheme, choice);
  std::vector<Digest> out;
  for (std::size_t j = 0; j < choice.size(); ++j)
    out.push_back(xor_digest(resp.masked.at(static_cast<std::size_t>(choice[j] - 1)), ot_mask(unblind(resp, j, r.at(j)))));
  return out;
}

std::vector<Digest> ot_malicious_extract(const OtScheme& scheme, const OtResponse& resp, const std::vector<Scalar>& r,
                                         const std::vector<int>& choice, int exponent) {
  check_choice(scheme, choice);
  const GroupElement first = unblind(resp, 0, r.at(0));
  const GroupElement second = unblind(resp, 1, r.at(1)) / first.pow(mpz_class(exponent));
  return {xor_digest(resp.masked.at(static_cast<std::size_t>(choice[0] - 1)), ot_mask(first)),
          xor_digest(resp.masked.at(static_cast<std::size_t>(choice[1] - 1)), ot_mask(second))};
}

std::optional<std::vector<int>> ot_tally_decode(const OtScheme& scheme, const GroupElement& plaintext) {
  mpz_class rest = plaintext.value();
  std::vector<int> out;
  for (std::size_t i = 0; i < scheme.gamma.size(); ++i) {
    const mpz_class& p = scheme.gamma[i].value();
    while (rest % p == 0) {
      rest /= p;
      out.push_back(static_cast<int>(i + 1));
      if (static_cast<int>(out.size()) > scheme.selections) return std::nullopt;
    }
  }
  if (rest != 1 || static_cast<int>(out.size()) != scheme.selections) return std::nullopt;
  return out;
}

CountermeasureResult ot_countermeasure_check(const OtScheme& scheme, const OtQuery& q) {
  CountermeasureResult res;
  if (q.b_parts.size() != q.a.size() || q.component_proofs.size() != q.a.size()) return res;
  GroupElement b = GroupElement::identity(scheme.params);
  for (const auto& x : q.b_parts) b *= x;
  bool ok = b == q.b && ot_check_query(scheme, q);
  for (std::size_t j = 0; j < q.a.size(); ++j) {
    const auto branches = component_branches(scheme, q.b_parts[j], q.a[j]);
    res.branches += branches.size();
    ok = verify_or(branches, q.component_proofs[j], component_transcript(scheme, j)) && ok;
  }
  res.accepted = ok;
  return res;
}

bool AttackDemo::attack_succeeds() const {
  return malicious_checks_pass && malicious_codes == expected_codes && !malicious_tally;
}

std::string AttackDemo::to_text() const {
  std::ostringstream out;
  out << "choice: " << choice_text(choice) << "\n";
  out << "expected codes: " << short_hex(expected_codes[0]) << " " << short_hex(expected_codes[1]) << "\n";
  out << "honest run: checks " << (honest_checks_pass ? "pass" : "fail") << ", codes "
      << short_hex(honest_codes[0]) << " " << short_hex(honest_codes[1]) << ", tally " << choice_text(honest_tally)
      << "\n";
  out << "malicious run: checks " << (malicious_checks_pass ? "pass" : "fail") << ", codes "
      << short_hex(malicious_codes[0]) << " " << short_hex(malicious_codes[1]) << ", tally "
      << choice_text(malicious_tally) << " (plaintext " << malicious_plaintext << ")\n";
  out << "attack " << (attack_succeeds() ? "succeeds" : "fails")
      << ": the voter sees the expected codes but the ballot is discarded at tally\n";
  out << "countermeasure: honest queries " << (countermeasure_accepts_honest ? "accepted" : "REJECTED")
      << ", malicious query " << (countermeasure_rejects_malicious ? "rejected" : "ACCEPTED") << ", "
      << countermeasure_branches << " branches per query\n";
  return out.str();
}

std::string AttackDemo::to_json() const {
  auto hexes = [](const std::vector<Digest>& ds) {
    std::vector<std::string> out;
    for (const auto& d : ds) out.push_back(to_hex(d));
    return out;
  };
  nlohmann::json j{{"choice", choice},
                   {"expected_codes", hexes(expected_codes)},
                   {"honest_codes", hexes(honest_codes)},
                   {"malicious_codes", hexes(malicious_codes)},
                   {"honest_checks_pass", honest_checks_pass},
                   {"malicious_checks_pass", malicious_checks_pass},
                   {"honest_tally", honest_tally ? nlohmann::json(*honest_tally) : nlohmann::json(nullptr)},
                   {"malicious_tally", malicious_tally ? nlohmann::json(*malicious_tally) : nlohmann::json(nullptr)},
                   {"malicious_plaintext", malicious_plaintext},
                   {"attack_succeeds", attack_succeeds()},
                   {"countermeasure_accepts_honest", countermeasure_accepts_honest},
                   {"countermeasure_rejects_malicious", countermeasure_rejects_malicious},
                   {"countermeasure_branches", countermeasure_branches}};
  return j.dump();
}

AttackDemo run_attack_demo(const ParamsPtr& params, std::string_view seed, const std::vector<int>& choice) {
  Rng rng(seed);
  Rng setup_rng = rng.fork("setup");
  const OtScheme scheme = ot_setup(params, 2, 2, setup_rng);
  AttackDemo d;
  d.choice = choice;
  for (int s : choice) d.expected_codes.push_back(scheme.codes[static_cast<std::size_t>(s - 1)]);

  Rng honest_rng = rng.fork("honest");
  const auto honest = ot_honest_query(scheme, choice, honest_rng);
  d.honest_checks_pass = ot_check_query(scheme, honest.query);
  const auto honest_resp = ot_respond(scheme, honest.query, Scalar::random_nonzero(params, honest_rng));
  d.honest_codes = ot_extract_codes(scheme, honest_resp, honest.r, choice);
  d.honest_tally = ot_tally_decode(scheme, decrypt(scheme.election.sk, ot_implied_ciphertext(honest.query)));

  Rng mal_rng = rng.fork("malicious");
  const auto mal = ot_malicious_query(scheme, choice, mal_rng);
  d.malicious_checks_pass = ot_check_query(scheme, mal.query);
  const auto mal_resp = ot_respond(scheme, mal.query, Scalar::random_nonzero(params, mal_rng));
  d.malicious_codes = ot_malicious_extract(scheme, mal_resp, mal.r, choice);
  const auto mal_plain = decrypt(scheme.election.sk, ot_implied_ciphertext(mal.query));
  d.malicious_plaintext = mal_plain.str();
  d.malicious_tally = ot_tally_decode(scheme, mal_plain);

  Rng cm_rng = rng.fork("countermeasure");
  d.countermeasure_accepts_honest = true;
  for (int s1 = 1; s1 <= 2; ++s1) {
    for (int s2 = 1; s2 <= 2; ++s2) {
      const auto q = ot_honest_query(scheme, {s1, s2}, cm_rng);
      const auto res = ot_countermeasure_check(scheme, q.query);
      d.countermeasure_accepts_honest = d.countermeasure_accepts_honest && res.accepted;
      d.countermeasure_branches = res.branches;
    }
  }
  d.countermeasure_rejects_malicious = !ot_countermeasure_check(scheme, mal.query).accepted;
  return d;
}

}  // namespace rcv
