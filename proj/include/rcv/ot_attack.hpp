#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rcv/elgamal.hpp"
#include "rcv/hash.hpp"
#include "rcv/sigma.hpp"

namespace rcv {

/// Minimal model of an oblivious-transfer based return-code scheme, reduced
/// to query, response and code extraction. Candidates are 1..n with
/// Gamma(i) the i-th residue prime; a ballot selects k candidates (repeats
/// allowed) and its plaintext is the product of their Gamma values.
struct OtScheme {
  ParamsPtr params;
  std::vector<GroupElement> gamma;
  KeyPair election;
  /// 32-byte code per candidate.
  std::vector<Digest> codes;
  int selections = 2;

  int candidates() const { return static_cast<int>(gamma.size()); }
};

OtScheme ot_setup(const ParamsPtr& params, int candidates, int selections, Rng& rng);

/// a_j = Gamma(s_j) y^{r_j}, b = g^{sum r_j}, and a proof of knowledge of
/// the randomness of (b, prod a_j). The per-component parts b_j = g^{r_j}
/// and their disjunctive proofs are used only by the countermeasure.
struct OtQuery {
  std::vector<GroupElement> a;
  GroupElement b;
  SchnorrProof pok;
  std::vector<GroupElement> b_parts;
  std::vector<OrProof> component_proofs;
};

struct OtQueryResult {
  OtQuery query;
  std::vector<Scalar> r;
};

/// `choice` holds k candidate indices in 1..n.
OtQueryResult ot_honest_query(const OtScheme& scheme, const std::vector<int>& choice, Rng& rng);
/// Replaces a_2 by Gamma(s_1)^exponent Gamma(s_2) y^{r_2}; the implied
/// plaintext becomes Gamma(s_1)^{exponent+1} Gamma(s_2). The component
/// proofs are the best a cheating platform can do: real proofs for the
/// wrong statement.
OtQueryResult ot_malicious_query(const OtScheme& scheme, const std::vector<int>& choice, Rng& rng, int exponent = 7);

/// (b, prod a_j), the ciphertext that counts as the cast ballot.
Ciphertext ot_implied_ciphertext(const OtQuery& q);
/// The modeled scheme's own check: the proof of knowledge of (r, p).
bool ot_check_query(const OtScheme& scheme, const OtQuery& q);

struct OtResponse {
  std::vector<GroupElement> a_alpha;
  GroupElement y_alpha;
  /// codes[i] xor H(Gamma(i)^alpha) for every candidate i.
  std::vector<Digest> masked;
};

OtResponse ot_respond(const OtScheme& scheme, const OtQuery& q, const Scalar& alpha);
Digest ot_mask(const GroupElement& x);
std::vector<Digest> ot_extract_codes(const OtScheme& scheme, const OtResponse& resp, const std::vector<Scalar>& r,
                                     const std::vector<int>& choice);
/// Recovers Gamma(s_2)^alpha as (Gamma(s_1)^e Gamma(s_2))^alpha / (Gamma(s_1)^alpha)^e.
std::vector<Digest> ot_malicious_extract(const OtScheme& scheme, const OtResponse& resp, const std::vector<Scalar>& r,
                                         const std::vector<int>& choice, int exponent = 7);

/// Tally-side decoding: the plaintext must be a product of exactly k
/// candidate primes. Returns the sorted candidate multiset.
std::optional<std::vector<int>> ot_tally_decode(const OtScheme& scheme, const GroupElement& plaintext);

struct CountermeasureResult {
  bool accepted = false;
  /// Disjunctive branches verified, k * n for a well-formed query.
  std::size_t branches = 0;
};

/// Checks b = prod b_j and that each (b_j, a_j) encrypts one of the n
/// candidate encodings.
CountermeasureResult ot_countermeasure_check(const OtScheme& scheme, const OtQuery& q);

struct AttackDemo {
  std::vector<int> choice;
  std::vector<Digest> expected_codes;
  std::vector<Digest> honest_codes;
  std::vector<Digest> malicious_codes;
  bool honest_checks_pass = false;
  bool malicious_checks_pass = false;
  std::optional<std::vector<int>> honest_tally;
  std::optional<std::vector<int>> malicious_tally;
  std::string malicious_plaintext;
  bool countermeasure_accepts_honest = false;
  bool countermeasure_rejects_malicious = false;
  std::size_t countermeasure_branches = 0;

  /// Checks pass, the voter sees the expected codes, and the tally rejects.
  bool attack_succeeds() const;
  std::string to_text() const;
  std::string to_json() const;
};

/// Honest and malicious runs for n = k = 2 plus the countermeasure over
/// every honest choice pair.
AttackDemo run_attack_demo(const ParamsPtr& params, std::string_view seed, const std::vector<int>& choice = {1, 2});

}  // namespace rcv
