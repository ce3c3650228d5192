#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rcv/codegen.hpp"
#include "rcv/elgamal.hpp"
#include "rcv/encoding.hpp"
#include "rcv/pet.hpp"

namespace rcv {

/// Public election material.
struct ElectionPublic {
  std::string election_id;
  OptionEncoding options;
  CodeEncoding codes;
  ThresholdPublicKey election_key;
  ThresholdPublicKey code_key;
  Cca2PublicKey aux_key;
  GroupElement printing_key;

  const ParamsPtr& params() const { return options.params(); }
  CodegenKeys codegen_keys() const { return CodegenKeys{election_key.pk, code_key.pk, printing_key}; }
};

enum class TellerMode { Honest, Active };

/// A teller's private material. Active tellers corrupt every proof they
/// produce.
struct Teller {
  int index = 0;
  TellerKeyShare election_share;
  TellerKeyShare code_share;
  Cca2KeyPair aux;
  TellerMode mode = TellerMode::Honest;
};

struct ElectionSecrets {
  std::vector<Teller> tellers;
  KeyPair printing;
};

struct SetupResult {
  ElectionPublic pub;
  ElectionSecrets secrets;
  std::vector<std::vector<GroupElement>> election_dealings;
  std::vector<std::vector<GroupElement>> code_dealings;
};

/// Key generation for every authority. Teller 1 deals the auxiliary
/// (CCA2) key to all tellers.
SetupResult setup_election(const std::string& election_id, const ParamsPtr& params, int options, int code_bits,
                           std::uint64_t code_space, CodeMode mode, int tellers, int threshold, Rng& rng);

struct Ballot {
  std::string voter_id;
  Ciphertext w;
  Cca2Ciphertext btilde;
  SchnorrProof pok;
};

std::string ballot_context(const std::string& election_id, const std::string& voter_id);

/// Honest voting platform: w encrypts the product of the chosen primes and
/// btilde = b xor v.
Ballot platform_build_ballot(const ElectionPublic& pub, const std::string& voter_id, const std::vector<bool>& choices,
                             const std::vector<bool>& flip_bits, Rng& rng);
/// Arbitrary plaintext and btilde; used to model cheating platforms.
Ballot build_ballot_raw(const ElectionPublic& pub, const std::string& voter_id, const GroupElement& plaintext,
                        const std::vector<bool>& btilde, Rng& rng);

std::vector<bool> xor_bits(const std::vector<bool>& a, const std::vector<bool>& b);

enum class SessionState { Submitted, PetChecked, CodesSent, Finalized, Cancelled };
const char* to_string(SessionState s);

struct CastSession {
  std::string voter_id;
  SessionState state = SessionState::Submitted;
  Ballot ballot;
  std::vector<bool> btilde;
  int btilde_teller = 0;
  std::optional<Ciphertext> e_star;
  std::optional<Ciphertext> c_star;
  std::optional<PetTranscript> pet;
  std::vector<DecryptionShare> code_shares;
  std::vector<std::uint64_t> sent_codes;
  std::vector<DecryptionShare> conf_shares;
  std::optional<std::uint64_t> confirmation;
  std::string reason;
};

/// (e*, c*): component-wise product of the cells selected by btilde.
std::pair<Ciphertext, Ciphertext> select_cells(const CodeTableRow& row, const std::vector<bool>& btilde);

/// Voting server with the teller set it coordinates.
class VotingServer {
 public:
  VotingServer(ElectionPublic pub, std::vector<CodeTableRow> table, std::map<std::string, std::string> auth_digests);

  /// Authenticates, checks the proof, decrypts btilde, runs the PET and
  /// decrypts the code product. Throws ProtocolError on authentication
  /// failure or re-voting and ProofError on an invalid ballot proof (no
  /// session is created in either case). A failed PET or a malformed code
  /// product yields a Cancelled session.
  const CastSession& submit(const Ballot& ballot, const std::string& auth_code, std::vector<Teller>& tellers,
                            Rng& rng);
  /// Checks the opening of c_fin and decrypts the confirmation code. Throws
  /// ProtocolError unless the session is in CodesSent or on a bad opening.
  std::uint64_t finalize(const std::string& voter_id, const std::string& finalization_code,
                         std::vector<Teller>& tellers, Rng& rng);

  const CastSession* session(const std::string& voter_id) const;
  const std::map<std::string, CastSession>& sessions() const { return sessions_; }
  /// Finalized ballots in finalization order.
  std::vector<Ballot> ballot_box() const;
  const std::vector<std::string>& box_order() const { return box_order_; }
  const std::set<int>& excluded_tellers() const { return excluded_; }
  const CodeTableRow& row(const std::string& voter_id) const;
  const ElectionPublic& pub() const { return pub_; }

  /// Reinstates persisted state.
  void restore(std::map<std::string, CastSession> sessions, std::vector<std::string> box_order, std::set<int> excluded);

 private:
  std::vector<Teller*> active_tellers(std::vector<Teller>& tellers);
  std::vector<DecryptionShare> collect_shares(std::vector<Teller*>& tellers, const Ciphertext& c, bool code_key,
                                              Rng& rng);

  ElectionPublic pub_;
  std::map<std::string, CodeTableRow> table_;
  std::map<std::string, std::string> auth_;
  std::map<std::string, CastSession> sessions_;
  std::vector<std::string> box_order_;
  std::set<int> excluded_;
};

/// Decryption share as produced by the teller, corrupted if it is active.
DecryptionShare teller_share(const Teller& teller, const TellerKeyShare& share, const Ciphertext& c, Rng& rng);

/// Public re-check of a session against the code table: proof of the
/// ballot, e*/c* recomputed from the published btilde, PET transcript and
/// code decryption shares.
std::optional<std::string> check_session(const ElectionPublic& pub, const CodeTableRow& row,
                                         const CastSession& session);

/// accept iff every received code equals the printed code for the chosen
/// side.
bool voter_check_codes(const BallotSheet& sheet, const std::vector<bool>& choices,
                       const std::vector<std::uint64_t>& codes);
bool voter_check_confirmation(const BallotSheet& sheet, std::uint64_t confirmation);

struct TallyEntry {
  std::string voter_id;
  std::vector<DecryptionShare> shares;
  std::optional<GroupElement> plaintext;
  std::vector<bool> choices;
  bool accepted = false;
  std::string error;
};

struct TallyResult {
  std::vector<std::uint64_t> counts;
  std::vector<TallyEntry> entries;
  std::vector<std::string> rejected;
};

/// Stand-in tally: verifiable threshold decryption of each ballot, then
/// option decoding. Malformed plaintexts are rejected and listed.
TallyResult tally(const ElectionPublic& pub, const std::vector<Ballot>& box, std::vector<Teller>& tellers, Rng& rng);
std::optional<std::string> check_tally(const ElectionPublic& pub, const std::vector<Ballot>& box,
                                       const TallyResult& result);

}  // namespace rcv
