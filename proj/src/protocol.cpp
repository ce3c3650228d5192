#include "rcv/protocol.hpp"

#include "rcv/error.hpp"
#include "rcv/metrics.hpp"
#include "rcv/proofs.hpp"

namespace rcv {

namespace {

void corrupt(DecryptionShare& s) { s.value = s.value * GroupElement::generator(s.value.params()); }

PetHooks active_hooks(const std::vector<Teller*>& tellers) {
  std::set<int> active;
  for (const auto* t : tellers)
    if (t->mode == TellerMode::Active) active.insert(t->index);
  PetHooks hooks;
  if (active.empty()) return hooks;
  hooks.tamper_step = [active](PetStep& s) {
    if (active.count(s.teller)) s.proof.response = s.proof.response + Scalar(s.proof.response.params(), 1);
  };
  hooks.tamper_share = [active](DecryptionShare& s) {
    if (active.count(s.index)) corrupt(s);
  };
  return hooks;
}

}  // namespace

SetupResult setup_election(const std::string& election_id, const ParamsPtr& params, int options, int code_bits,
                           std::uint64_t code_space, CodeMode mode, int tellers, int threshold, Rng& rng) {
  OptionEncoding opt(params, options);
  CodeEncoding codes(params, options, code_bits, code_space, mode);
  Rng erng = rng.fork("dkg/election");
  Rng crng = rng.fork("dkg/code");
  Rng arng = rng.fork("aux");
  Rng prng = rng.fork("printing");
  auto e = dkg(params, tellers, threshold, erng);
  auto c = dkg(params, tellers, threshold, crng);
  auto aux = cca2_keygen(params, arng);
  auto printing = keygen(params, prng);

  ElectionSecrets secrets{{}, printing};
  for (int i = 0; i < tellers; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    secrets.tellers.push_back(Teller{i + 1, e.shares[idx], c.shares[idx], aux, TellerMode::Honest});
  }
  return SetupResult{ElectionPublic{election_id, std::move(opt), std::move(codes), e.public_key, c.public_key, aux.pk,
                                    printing.pk},
                     std::move(secrets), e.dealer_commitments, c.dealer_commitments};
}

std::string ballot_context(const std::string& election_id, const std::string& voter_id) {
  return election_id + "/" + voter_id;
}

std::vector<bool> xor_bits(const std::vector<bool>& a, const std::vector<bool>& b) {
  if (a.size() != b.size()) throw InvalidArgument("bit vectors differ in length");
  std::vector<bool> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] != b[i];
  return out;
}

Ballot build_ballot_raw(const ElectionPublic& pub, const std::string& voter_id, const GroupElement& plaintext,
                        const std::vector<bool>& btilde, Rng& rng) {
  const auto& params = pub.params();
  const Scalar r = Scalar::random(params, rng);
  const Ciphertext w = encrypt(pub.election_key.pk, plaintext, r);
  const std::string ctx = ballot_context(pub.election_id, voter_id);
  auto bt = cca2_encrypt(pub.aux_key, pub.options.encode_choice(btilde), rng, ctx);
  auto pok = prove_plaintext_knowledge(pub.election_key.pk, w, r, ctx, rng);
  return Ballot{voter_id, w, std::move(bt), std::move(pok)};
}

Ballot platform_build_ballot(const ElectionPublic& pub, const std::string& voter_id, const std::vector<bool>& choices,
                             const std::vector<bool>& flip_bits, Rng& rng) {
  return build_ballot_raw(pub, voter_id, pub.options.encode_choice(choices), xor_bits(flip_bits, choices), rng);
}

const char* to_string(SessionState s) {
  switch (s) {
    case SessionState::Submitted: return "submitted";
    case SessionState::PetChecked: return "pet-checked";
    case SessionState::CodesSent: return "codes-sent";
    case SessionState::Finalized: return "finalized";
    case SessionState::Cancelled: return "cancelled";
  }
  return "?";
}

std::pair<Ciphertext, Ciphertext> select_cells(const CodeTableRow& row, const std::vector<bool>& btilde) {
  if (btilde.size() != row.cells.size()) throw InvalidArgument("btilde length differs from the option count");
  std::optional<Ciphertext> e, c;
  for (std::size_t i = 0; i < btilde.size(); ++i) {
    const auto& cell = row.cells[i][btilde[i] ? 1 : 0];
    e = e ? *e * cell.choice : cell.choice;
    c = c ? *c * cell.code : cell.code;
  }
  if (!e) throw InvalidArgument("empty code table row");
  return {*e, *c};
}

DecryptionShare teller_share(const Teller& teller, const TellerKeyShare& share, const Ciphertext& c, Rng& rng) {
  auto s = partial_decrypt(share, c, rng);
  if (teller.mode == TellerMode::Active) corrupt(s);
  return s;
}

VotingServer::VotingServer(ElectionPublic pub, std::vector<CodeTableRow> table,
                           std::map<std::string, std::string> auth_digests)
    : pub_(std::move(pub)), auth_(std::move(auth_digests)) {
  for (auto& row : table) {
    const std::string id = row.voter_id;
    table_.emplace(id, std::move(row));
  }
}

const CodeTableRow& VotingServer::row(const std::string& voter_id) const {
  const auto it = table_.find(voter_id);
  if (it == table_.end()) throw InvalidArgument("unknown voter " + voter_id);
  return it->second;
}

const CastSession* VotingServer::session(const std::string& voter_id) const {
  const auto it = sessions_.find(voter_id);
  return it == sessions_.end() ? nullptr : &it->second;
}

std::vector<Teller*> VotingServer::active_tellers(std::vector<Teller>& tellers) {
  std::vector<Teller*> out;
  for (auto& t : tellers)
    if (!excluded_.count(t.index)) out.push_back(&t);
  return out;
}

std::vector<DecryptionShare> VotingServer::collect_shares(std::vector<Teller*>& tellers, const Ciphertext& c,
                                                          bool code_key, Rng& rng) {
  const auto& key = code_key ? pub_.code_key : pub_.election_key;
  std::vector<DecryptionShare> out;
  for (auto* t : tellers) {
    if (static_cast<int>(out.size()) == key.threshold) break;
    auto s = teller_share(*t, code_key ? t->code_share : t->election_share, c, rng);
    if (verify_decryption_share(key, c, s)) {
      out.push_back(std::move(s));
    } else {
      excluded_.insert(t->index);
    }
  }
  if (static_cast<int>(out.size()) < key.threshold) throw ProtocolError("fewer than t honest tellers remain");
  return out;
}

const CastSession& VotingServer::submit(const Ballot& ballot, const std::string& auth_code,
                                        std::vector<Teller>& tellers, Rng& rng) {
  const auto& row = this->row(ballot.voter_id);
  const auto auth = auth_.find(ballot.voter_id);
  if (auth == auth_.end() || auth->second != auth_digest(auth_code)) throw ProtocolError("authentication failed");
  if (sessions_.count(ballot.voter_id)) throw ProtocolError("re-voting is not allowed");
  const std::string ctx = ballot_context(pub_.election_id, ballot.voter_id);
  if (!verify_plaintext_knowledge(pub_.election_key.pk, ballot.w, ballot.pok, ctx))
    throw ProofError("ballot proof of knowledge rejected");

  auto active = active_tellers(tellers);
  if (active.empty()) throw ProtocolError("no tellers available");
  const Teller& designated = *active.front();
  std::vector<bool> btilde;
  try {
    btilde = pub_.options.decode_choice(cca2_decrypt(designated.aux, ballot.btilde, ctx));
  } catch (const MalformedPlaintext&) {
    throw ProofError("btilde does not decode");
  }

  auto [it, inserted] = sessions_.emplace(ballot.voter_id, CastSession{ballot.voter_id, SessionState::Submitted,
                                                                       ballot, btilde, designated.index, {}, {}, {},
                                                                       {}, {}, {}, {}, {}});
  (void)inserted;
  CastSession& s = it->second;
  const auto [e_star, c_star] = select_cells(row, btilde);
  s.e_star = e_star;
  s.c_star = c_star;

  for (;;) {
    active = active_tellers(tellers);
    if (static_cast<int>(active.size()) < pub_.election_key.threshold)
      throw ProtocolError("fewer than t honest tellers remain");
    std::vector<TellerKeyShare> shares;
    for (const auto* t : active) shares.push_back(t->election_share);
    try {
      s.pet = pet_run(pub_.election_key, shares, e_star, ballot.w, rng, active_hooks(active));
      for (const auto* t : active)
        if (t->mode == TellerMode::Active) excluded_.insert(t->index);
      break;
    } catch (const ProofError& e) {
      if (e.party() == 0) throw;
      excluded_.insert(e.party());
    }
  }
  if (!s.pet->verdict) {
    s.state = SessionState::Cancelled;
    s.reason = "plaintext equivalence test failed";
    return s;
  }
  s.state = SessionState::PetChecked;

  ++op_counters().threshold_decryptions;
  active = active_tellers(tellers);
  s.code_shares = collect_shares(active, c_star, true, rng);
  const auto product = combine_shares(pub_.code_key, s.code_shares, c_star);
  try {
    s.sent_codes = pub_.codes.decode_codes(product);
  } catch (const MalformedPlaintext& e) {
    s.state = SessionState::Cancelled;
    s.reason = std::string("malformed code product: ") + e.what();
    return s;
  }
  s.state = SessionState::CodesSent;
  return s;
}

std::uint64_t VotingServer::finalize(const std::string& voter_id, const std::string& finalization_code,
                                     std::vector<Teller>& tellers, Rng& rng) {
  const auto it = sessions_.find(voter_id);
  if (it == sessions_.end()) throw ProtocolError("no ballot cast for " + voter_id);
  CastSession& s = it->second;
  if (s.state != SessionState::CodesSent)
    throw ProtocolError(std::string("cannot finalize a session in state ") + to_string(s.state));
  const auto& row = this->row(voter_id);
  if (!open_finalization(voter_id, finalization_code, row.fin_commitment))
    throw ProtocolError("finalization code does not open the commitment");
  auto active = active_tellers(tellers);
  s.conf_shares = collect_shares(active, row.conf_ciphertext, true, rng);
  const mpz_class conf = extract_integer(combine_shares(pub_.code_key, s.conf_shares, row.conf_ciphertext));
  if (!conf.fits_ulong_p()) throw ProtocolError("confirmation code out of range");
  s.confirmation = conf.get_ui();
  s.state = SessionState::Finalized;
  box_order_.push_back(voter_id);
  return *s.confirmation;
}

std::vector<Ballot> VotingServer::ballot_box() const {
  std::vector<Ballot> out;
  for (const auto& id : box_order_) out.push_back(sessions_.at(id).ballot);
  return out;
}

void VotingServer::restore(std::map<std::string, CastSession> sessions, std::vector<std::string> box_order,
                           std::set<int> excluded) {
  sessions_ = std::move(sessions);
  box_order_ = std::move(box_order);
  excluded_ = std::move(excluded);
}

std::optional<std::string> check_session(const ElectionPublic& pub, const CodeTableRow& row,
                                         const CastSession& s) {
  const std::string ctx = ballot_context(pub.election_id, s.voter_id);
  if (s.ballot.voter_id != s.voter_id || row.voter_id != s.voter_id) return "session voter mismatch";
  if (!verify_plaintext_knowledge(pub.election_key.pk, s.ballot.w, s.ballot.pok, ctx)) return "ballot proof rejected";
  if (s.btilde.size() != row.cells.size()) return "btilde has the wrong length";
  const auto [e_star, c_star] = select_cells(row, s.btilde);
  if (!s.e_star || *s.e_star != e_star || !s.c_star || *s.c_star != c_star) return "e*/c* do not match the table";
  if (!s.pet) return "missing PET transcript";
  if (!verify_pet(*s.pet, e_star, s.ballot.w, pub.election_key)) return "PET transcript rejected";
  const bool codes_expected = s.state == SessionState::CodesSent || s.state == SessionState::Finalized;
  if (!s.pet->verdict && (codes_expected || !s.code_shares.empty())) return "codes released after a failed PET";
  if (!s.pet->verdict && s.state != SessionState::Cancelled) return "failed PET without cancellation";
  if (codes_expected) {
    if (static_cast<int>(s.code_shares.size()) != pub.code_key.threshold) return "wrong number of code shares";
    try {
      combine_shares(pub.code_key, s.code_shares, c_star);
    } catch (const Error&) {
      return "code decryption shares rejected";
    }
  }
  if (s.state == SessionState::Finalized) {
    if (static_cast<int>(s.conf_shares.size()) != pub.code_key.threshold) return "wrong number of confirmation shares";
    try {
      const auto conf = extract_integer(combine_shares(pub.code_key, s.conf_shares, row.conf_ciphertext));
      if (!s.confirmation || conf != *s.confirmation) return "confirmation code mismatch";
    } catch (const Error&) {
      return "confirmation decryption shares rejected";
    }
  }
  return std::nullopt;
}

bool voter_check_codes(const BallotSheet& sheet, const std::vector<bool>& choices,
                       const std::vector<std::uint64_t>& codes) {
  if (choices.size() != sheet.return_codes.size() || codes.size() != choices.size()) return false;
  for (std::size_t i = 0; i < codes.size(); ++i)
    if (codes[i] != sheet.return_codes[i][choices[i] ? 1 : 0]) return false;
  return true;
}

bool voter_check_confirmation(const BallotSheet& sheet, std::uint64_t confirmation) {
  return sheet.confirmation_code == confirmation;
}

TallyResult tally(const ElectionPublic& pub, const std::vector<Ballot>& box, std::vector<Teller>& tellers, Rng& rng) {
  TallyResult res;
  res.counts.assign(static_cast<std::size_t>(pub.options.options()), 0);
  for (const auto& ballot : box) {
    TallyEntry entry;
    entry.voter_id = ballot.voter_id;
    for (const auto& t : tellers) {
      if (static_cast<int>(entry.shares.size()) == pub.election_key.threshold) break;
      auto s = teller_share(t, t.election_share, ballot.w, rng);
      if (verify_decryption_share(pub.election_key, ballot.w, s)) entry.shares.push_back(std::move(s));
    }
    if (static_cast<int>(entry.shares.size()) < pub.election_key.threshold)
      throw ProtocolError("fewer than t honest tellers remain");
    entry.plaintext = combine_shares(pub.election_key, entry.shares, ballot.w);
    try {
      entry.choices = pub.options.decode_choice(*entry.plaintext);
      entry.accepted = true;
      for (std::size_t i = 0; i < entry.choices.size(); ++i) res.counts[i] += entry.choices[i];
    } catch (const MalformedPlaintext& e) {
      entry.error = e.what();
      res.rejected.push_back(ballot.voter_id);
    }
    res.entries.push_back(std::move(entry));
  }
  return res;
}

std::optional<std::string> check_tally(const ElectionPublic& pub, const std::vector<Ballot>& box,
                                       const TallyResult& result) {
  if (result.entries.size() != box.size()) return "tally entry count differs from the ballot box";
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(pub.options.options()), 0);
  std::vector<std::string> rejected;
  for (std::size_t i = 0; i < box.size(); ++i) {
    const auto& e = result.entries[i];
    if (e.voter_id != box[i].voter_id) return "tally entries out of order";
    if (static_cast<int>(e.shares.size()) != pub.election_key.threshold) return "wrong number of tally shares";
    GroupElement plain = GroupElement::identity(pub.params());
    try {
      plain = combine_shares(pub.election_key, e.shares, box[i].w);
    } catch (const Error&) {
      return "tally decryption share rejected for " + e.voter_id;
    }
    if (!e.plaintext || *e.plaintext != plain) return "tally plaintext mismatch for " + e.voter_id;
    try {
      const auto choices = pub.options.decode_choice(plain);
      if (!e.accepted || choices != e.choices) return "tally decoding mismatch for " + e.voter_id;
      for (std::size_t j = 0; j < choices.size(); ++j) counts[j] += choices[j];
    } catch (const MalformedPlaintext&) {
      if (e.accepted) return "malformed plaintext counted for " + e.voter_id;
      rejected.push_back(e.voter_id);
    }
  }
  if (counts != result.counts) return "tally counts do not add up";
  if (rejected != result.rejected) return "rejected list mismatch";
  return std::nullopt;
}

}  // namespace rcv
