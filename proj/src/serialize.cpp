#include "rcv/serialize.hpp"

#include "rcv/error.hpp"

namespace rcv::ser {

namespace {

template <class F>
auto guard(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const FormatError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(e.what());
  }
}

mpz_class decimal(const json& j) {
  const std::string s = j.get<std::string>();
  if (s.empty() || s.size() > 4096) throw FormatError("bad decimal");
  for (char ch : s)
    if (ch < '0' || ch > '9') throw FormatError("bad decimal");
  if (s.size() > 1 && s[0] == '0') throw FormatError("non-canonical decimal");
  return mpz_class(s);
}

template <class T, class D>
std::vector<T> list(const json& j, D&& decode) {
  if (!j.is_array()) throw FormatError("expected an array");
  std::vector<T> out;
  out.reserve(j.size());
  for (const auto& x : j) out.push_back(decode(x));
  return out;
}

template <class T>
json enc_list(const std::vector<T>& xs) {
  json out = json::array();
  for (const auto& x : xs) out.push_back(enc(x));
  return out;
}

int small_int(const json& j) { return j.get<int>(); }

}  // namespace

json enc(const GroupElement& x) { return x.str(); }
json enc(const Scalar& x) { return x.str(); }
json enc(const Ciphertext& c) { return json{{"a", enc(c.a)}, {"b", enc(c.b)}}; }
json enc(const SchnorrProof& p) {
  return json{{"commitment", enc(p.commitment)}, {"challenge", enc(p.challenge)}, {"response", enc(p.response)}};
}
json enc(const EqDlogProof& p) {
  return json{{"t1", enc(p.commitment1)},
              {"t2", enc(p.commitment2)},
              {"challenge", enc(p.challenge)},
              {"response", enc(p.response)}};
}
json enc(const OrProof& p) {
  json branches = json::array();
  for (const auto& b : p.branches) {
    json terms = json::array();
    for (const auto& t : b.terms)
      terms.push_back(json{{"t1", enc(t.commitment1)}, {"t2", enc(t.commitment2)}, {"response", enc(t.response)}});
    branches.push_back(json{{"challenge", enc(b.challenge)}, {"terms", terms}});
  }
  return branches;
}
json enc(const DecryptionShare& s) {
  return json{{"index", s.index}, {"value", enc(s.value)}, {"proof", enc(s.proof)}};
}
json enc(const std::vector<DecryptionShare>& shares) { return enc_list(shares); }
json enc(const PetTranscript& t) {
  json steps = json::array();
  for (const auto& s : t.steps)
    steps.push_back(json{{"teller", s.teller}, {"input", enc(s.input)}, {"output", enc(s.output)}, {"proof", enc(s.proof)}});
  return json{{"quotient", enc(t.quotient)},
              {"steps", steps},
              {"shares", enc_list(t.shares)},
              {"plaintext", enc(t.plaintext)},
              {"verdict", t.verdict}};
}
json enc(const Cca2Ciphertext& c) {
  return json{{"u1", enc(c.u1)}, {"u2", enc(c.u2)}, {"e", enc(c.e)}, {"v", enc(c.v)}};
}
json enc(const Cca2PublicKey& k) {
  return json{{"g1", enc(k.g1)}, {"g2", enc(k.g2)}, {"c", enc(k.c)}, {"d", enc(k.d)}, {"h", enc(k.h)}};
}
json enc(const Cca2SecretKey& k) {
  return json{{"x1", enc(k.x1)}, {"x2", enc(k.x2)}, {"y1", enc(k.y1)}, {"y2", enc(k.y2)}, {"z", enc(k.z)}};
}
json enc(const ThresholdPublicKey& k) {
  return json{{"pk", enc(k.pk)}, {"commitments", enc_list(k.commitments)}, {"threshold", k.threshold},
              {"tellers", k.tellers}};
}
json enc(const TellerKeyShare& s) {
  return json{{"index", s.index},         {"share", enc(s.share)},         {"commitments", enc_list(s.commitment_vector)},
              {"pk", enc(s.public_key)}, {"threshold", s.threshold}, {"tellers", s.tellers}};
}
json enc(const KeyPair& k) { return json{{"sk", enc(k.sk)}, {"pk", enc(k.pk)}}; }
json enc(const CodePair& p) { return json{{"code", enc(p.code)}, {"print", enc(p.print)}}; }
json enc(const MixProof& p) {
  json shadows = json::array();
  for (const auto& s : p.shadows) shadows.push_back(enc_list(s));
  json openings = json::array();
  for (const auto& o : p.openings)
    openings.push_back(json{{"permutation", o.permutation}, {"code_r", enc_list(o.code_r)}, {"print_r", enc_list(o.print_r)}});
  return json{{"shadows", shadows}, {"openings", openings}};
}
json enc(const ShuffleStep& s) {
  return json{{"teller", s.teller}, {"option", s.option}, {"output", enc_list(s.output)}, {"proof", enc(s.proof)}};
}
json enc(const Record& r) { return enc_list(r); }
json enc(const MicroMixStep& s) {
  json outputs = json::array();
  for (const auto& r : s.output) outputs.push_back(enc(r));
  return json{{"teller", s.teller}, {"output", outputs}, {"proofs", enc_list(s.proofs)}};
}
json enc(const CodeTableRow& r) {
  json cells = json::array();
  for (const auto& c : r.cells) {
    cells.push_back(json::array({json{{"choice", enc(c[0].choice)}, {"code", enc(c[0].code)}},
                                 json{{"choice", enc(c[1].choice)}, {"code", enc(c[1].code)}}}));
  }
  return json{{"voter", r.voter_id}, {"fin_commitment", r.fin_commitment}, {"conf", enc(r.conf_ciphertext)},
              {"cells", cells}};
}
json enc(const std::vector<bool>& bits) {
  std::string s;
  for (bool b : bits) s.push_back(b ? '1' : '0');
  return s;
}
json enc(const std::vector<GroupElement>& xs) { return enc_list(xs); }
json enc(const BallotSheet& s) {
  json codes = json::array();
  for (const auto& c : s.return_codes) codes.push_back(json::array({c[0], c[1]}));
  return json{{"voter", s.voter_id},
              {"auth_code", s.auth_code},
              {"finalization_code", s.finalization_code},
              {"confirmation_code", s.confirmation_code},
              {"flip_bits", enc(s.flip_bits)},
              {"return_codes", codes}};
}
json enc(const Ballot& b) {
  return json{{"voter", b.voter_id}, {"w", enc(b.w)}, {"btilde", enc(b.btilde)}, {"pok", enc(b.pok)}};
}
json enc(const CastSession& s) {
  json out{{"voter", s.voter_id},
           {"state", to_string(s.state)},
           {"ballot", enc(s.ballot)},
           {"btilde", enc(s.btilde)},
           {"btilde_teller", s.btilde_teller},
           {"e_star", s.e_star ? enc(*s.e_star) : json(nullptr)},
           {"c_star", s.c_star ? enc(*s.c_star) : json(nullptr)},
           {"pet", s.pet ? enc(*s.pet) : json(nullptr)},
           {"code_shares", enc_list(s.code_shares)},
           {"sent_codes", s.sent_codes},
           {"conf_shares", enc_list(s.conf_shares)},
           {"confirmation", s.confirmation ? json(*s.confirmation) : json(nullptr)},
           {"reason", s.reason}};
  return out;
}
json enc(const TallyResult& t) {
  json entries = json::array();
  for (const auto& e : t.entries) {
    entries.push_back(json{{"voter", e.voter_id},
                           {"shares", enc_list(e.shares)},
                           {"plaintext", e.plaintext ? enc(*e.plaintext) : json(nullptr)},
                           {"choices", enc(e.choices)},
                           {"accepted", e.accepted},
                           {"error", e.error}});
  }
  return json{{"counts", t.counts}, {"entries", entries}, {"rejected", t.rejected}};
}
json enc(const Teller& t) {
  return json{{"index", t.index},
              {"election_share", enc(t.election_share)},
              {"code_share", enc(t.code_share)},
              {"aux_sk", enc(t.aux.sk)},
              {"aux_pk", enc(t.aux.pk)},
              {"mode", t.mode == TellerMode::Active ? "active" : "honest"}};
}

GroupElement element(const json& j, const ParamsPtr& params) {
  return guard([&] {
    const mpz_class x = decimal(j);
    if (x < 1 || x >= params->p) throw FormatError("element out of range");
    return GroupElement::from_integer(params, x);
  });
}

Scalar scalar(const json& j, const ParamsPtr& params) {
  return guard([&] {
    const mpz_class x = decimal(j);
    if (x >= params->q) throw FormatError("scalar out of range");
    return Scalar(params, x);
  });
}

Ciphertext ciphertext(const json& j, const ParamsPtr& params) {
  return guard([&] { return Ciphertext{element(j.at("a"), params), element(j.at("b"), params)}; });
}

SchnorrProof schnorr(const json& j, const ParamsPtr& params) {
  return guard([&] {
    return SchnorrProof{element(j.at("commitment"), params), scalar(j.at("challenge"), params),
                        scalar(j.at("response"), params)};
  });
}

EqDlogProof eq_dlog(const json& j, const ParamsPtr& params) {
  return guard([&] {
    return EqDlogProof{element(j.at("t1"), params), element(j.at("t2"), params), scalar(j.at("challenge"), params),
                       scalar(j.at("response"), params)};
  });
}

OrProof or_proof(const json& j, const ParamsPtr& params) {
  return guard([&] {
    OrProof p;
    p.branches = list<OrBranch>(j, [&](const json& b) {
      return OrBranch{scalar(b.at("challenge"), params), list<OrTerm>(b.at("terms"), [&](const json& t) {
                        return OrTerm{element(t.at("t1"), params), element(t.at("t2"), params),
                                      scalar(t.at("response"), params)};
                      })};
    });
    return p;
  });
}

DecryptionShare decryption_share(const json& j, const ParamsPtr& params) {
  return guard([&] {
    return DecryptionShare{small_int(j.at("index")), element(j.at("value"), params), eq_dlog(j.at("proof"), params)};
  });
}

std::vector<DecryptionShare> decryption_shares(const json& j, const ParamsPtr& params) {
  return guard([&] { return list<DecryptionShare>(j, [&](const json& x) { return decryption_share(x, params); }); });
}

PetTranscript pet_transcript(const json& j, const ParamsPtr& params) {
  return guard([&] {
    auto steps = list<PetStep>(j.at("steps"), [&](const json& s) {
      return PetStep{small_int(s.at("teller")), ciphertext(s.at("input"), params), ciphertext(s.at("output"), params),
                     eq_dlog(s.at("proof"), params)};
    });
    return PetTranscript{ciphertext(j.at("quotient"), params), std::move(steps),
                         decryption_shares(j.at("shares"), params), element(j.at("plaintext"), params),
                         j.at("verdict").get<bool>()};
  });
}

Cca2Ciphertext cca2_ciphertext(const json& j, const ParamsPtr& params) {
  return guard([&] {
    return Cca2Ciphertext{element(j.at("u1"), params), element(j.at("u2"), params), element(j.at("e"), params),
                          element(j.at("v"), params)};
  });
}

Cca2PublicKey cca2_public_key(const json& j, const ParamsPtr& params) {
  return guard([&] {
    return Cca2PublicKey{element(j.at("g1"), params), element(j.at("g2"), params), element(j.at("c"), params),
                         element(j.at("d"), params), element(j.at("h"), params)};
  });
}

Cca2SecretKey cca2_secret_key(const json& j, const ParamsPtr& params) {
  return guard([&] {
    return Cca2SecretKey{scalar(j.at("x1"), params), scalar(j.at("x2"), params), scalar(j.at("y1"), params),
                         scalar(j.at("y2"), params), scalar(j.at("z"), params)};
  });
}

ThresholdPublicKey threshold_key(const json& j, const ParamsPtr& params) {
  return guard([&] {
    return ThresholdPublicKey{element(j.at("pk"), params), elements(j.at("commitments"), params),
                              small_int(j.at("threshold")), small_int(j.at("tellers"))};
  });
}

TellerKeyShare teller_key_share(const json& j, const ParamsPtr& params) {
  return guard([&] {
    return TellerKeyShare{small_int(j.at("index")),    scalar(j.at("share"), params),
                          elements(j.at("commitments"), params), element(j.at("pk"), params),
                          small_int(j.at("threshold")), small_int(j.at("tellers"))};
  });
}

KeyPair key_pair(const json& j, const ParamsPtr& params) {
  return guard([&] { return KeyPair{scalar(j.at("sk"), params), element(j.at("pk"), params)}; });
}

CodePair code_pair(const json& j, const ParamsPtr& params) {
  return guard([&] { return CodePair{ciphertext(j.at("code"), params), ciphertext(j.at("print"), params)}; });
}

MixProof mix_proof(const json& j, const ParamsPtr& params) {
  return guard([&] {
    MixProof p;
    p.shadows = list<std::vector<CodePair>>(j.at("shadows"), [&](const json& s) {
      return list<CodePair>(s, [&](const json& x) { return code_pair(x, params); });
    });
    p.openings = list<ShuffleOpening>(j.at("openings"), [&](const json& o) {
      ShuffleOpening op;
      op.permutation = o.at("permutation").get<std::vector<std::size_t>>();
      op.code_r = list<Scalar>(o.at("code_r"), [&](const json& x) { return scalar(x, params); });
      op.print_r = list<Scalar>(o.at("print_r"), [&](const json& x) { return scalar(x, params); });
      return op;
    });
    return p;
  });
}

ShuffleStep shuffle_step(const json& j, const ParamsPtr& params) {
  return guard([&] {
    return ShuffleStep{small_int(j.at("teller")), small_int(j.at("option")),
                       list<CodePair>(j.at("output"), [&](const json& x) { return code_pair(x, params); }),
                       mix_proof(j.at("proof"), params)};
  });
}

Record record(const json& j, const ParamsPtr& params) {
  return guard([&] { return list<Ciphertext>(j, [&](const json& x) { return ciphertext(x, params); }); });
}

MicroMixStep micro_mix_step(const json& j, const ParamsPtr& params) {
  return guard([&] {
    return MicroMixStep{small_int(j.at("teller")),
                        list<Record>(j.at("output"), [&](const json& x) { return record(x, params); }),
                        list<OrProof>(j.at("proofs"), [&](const json& x) { return or_proof(x, params); })};
  });
}

CodeTableRow table_row(const json& j, const ParamsPtr& params) {
  return guard([&] {
    auto cell = [&](const json& c) { return Cell{ciphertext(c.at("choice"), params), ciphertext(c.at("code"), params)}; };
    auto cells = list<std::array<Cell, 2>>(j.at("cells"), [&](const json& pair) {
      if (!pair.is_array() || pair.size() != 2) throw FormatError("cell pair expected");
      return std::array<Cell, 2>{cell(pair[0]), cell(pair[1])};
    });
    return CodeTableRow{j.at("voter").get<std::string>(), j.at("fin_commitment").get<std::string>(),
                        ciphertext(j.at("conf"), params), std::move(cells)};
  });
}

std::vector<bool> bits(const json& j) {
  return guard([&] {
    std::vector<bool> out;
    for (char ch : j.get<std::string>()) {
      if (ch != '0' && ch != '1') throw FormatError("bad bit string");
      out.push_back(ch == '1');
    }
    return out;
  });
}

std::vector<GroupElement> elements(const json& j, const ParamsPtr& params) {
  return guard([&] { return list<GroupElement>(j, [&](const json& x) { return element(x, params); }); });
}

BallotSheet ballot_sheet(const json& j) {
  return guard([&] {
    BallotSheet s;
    s.voter_id = j.at("voter").get<std::string>();
    s.auth_code = j.at("auth_code").get<std::string>();
    s.finalization_code = j.at("finalization_code").get<std::string>();
    s.confirmation_code = j.at("confirmation_code").get<std::uint64_t>();
    s.flip_bits = bits(j.at("flip_bits"));
    for (const auto& c : j.at("return_codes"))
      s.return_codes.push_back({c.at(0).get<std::uint64_t>(), c.at(1).get<std::uint64_t>()});
    return s;
  });
}

Ballot ballot(const json& j, const ParamsPtr& params) {
  return guard([&] {
    return Ballot{j.at("voter").get<std::string>(), ciphertext(j.at("w"), params),
                  cca2_ciphertext(j.at("btilde"), params), schnorr(j.at("pok"), params)};
  });
}

CastSession cast_session(const json& j, const ParamsPtr& params) {
  return guard([&] {
    static const std::map<std::string, SessionState> states{{"submitted", SessionState::Submitted},
                                                            {"pet-checked", SessionState::PetChecked},
                                                            {"codes-sent", SessionState::CodesSent},
                                                            {"finalized", SessionState::Finalized},
                                                            {"cancelled", SessionState::Cancelled}};
    const auto st = states.find(j.at("state").get<std::string>());
    if (st == states.end()) throw FormatError("unknown session state");
    CastSession s{j.at("voter").get<std::string>(),
                  st->second,
                  ballot(j.at("ballot"), params),
                  bits(j.at("btilde")),
                  small_int(j.at("btilde_teller")),
                  {},
                  {},
                  {},
                  decryption_shares(j.at("code_shares"), params),
                  j.at("sent_codes").get<std::vector<std::uint64_t>>(),
                  decryption_shares(j.at("conf_shares"), params),
                  {},
                  j.at("reason").get<std::string>()};
    if (!j.at("e_star").is_null()) s.e_star = ciphertext(j.at("e_star"), params);
    if (!j.at("c_star").is_null()) s.c_star = ciphertext(j.at("c_star"), params);
    if (!j.at("pet").is_null()) s.pet = pet_transcript(j.at("pet"), params);
    if (!j.at("confirmation").is_null()) s.confirmation = j.at("confirmation").get<std::uint64_t>();
    return s;
  });
}

TallyResult tally_result(const json& j, const ParamsPtr& params) {
  return guard([&] {
    TallyResult t;
    t.counts = j.at("counts").get<std::vector<std::uint64_t>>();
    t.rejected = j.at("rejected").get<std::vector<std::string>>();
    for (const auto& e : j.at("entries")) {
      TallyEntry entry;
      entry.voter_id = e.at("voter").get<std::string>();
      entry.shares = decryption_shares(e.at("shares"), params);
      if (!e.at("plaintext").is_null()) entry.plaintext = element(e.at("plaintext"), params);
      entry.choices = bits(e.at("choices"));
      entry.accepted = e.at("accepted").get<bool>();
      entry.error = e.at("error").get<std::string>();
      t.entries.push_back(std::move(entry));
    }
    return t;
  });
}

Teller teller(const json& j, const ParamsPtr& params) {
  return guard([&] {
    const std::string mode = j.at("mode").get<std::string>();
    if (mode != "honest" && mode != "active") throw FormatError("unknown teller mode");
    return Teller{small_int(j.at("index")), teller_key_share(j.at("election_share"), params),
                  teller_key_share(j.at("code_share"), params),
                  Cca2KeyPair{cca2_secret_key(j.at("aux_sk"), params), cca2_public_key(j.at("aux_pk"), params)},
                  mode == "active" ? TellerMode::Active : TellerMode::Honest};
  });
}

json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(e.what());
  }
}

}  // namespace rcv::ser
