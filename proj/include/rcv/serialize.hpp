#pragma once

#include <json.hpp>

#include "rcv/codegen.hpp"
#include "rcv/protocol.hpp"

namespace rcv::ser {

using json = nlohmann::json;

/// Encoders produce compact JSON with big integers as decimal strings.
/// Decoders take the group so every element is membership-checked; any
/// structural problem raises FormatError.

json enc(const GroupElement& x);
json enc(const Scalar& x);
json enc(const Ciphertext& c);
json enc(const SchnorrProof& p);
json enc(const EqDlogProof& p);
json enc(const OrProof& p);
json enc(const DecryptionShare& s);
json enc(const PetTranscript& t);
json enc(const Cca2Ciphertext& c);
json enc(const Cca2PublicKey& k);
json enc(const Cca2SecretKey& k);
json enc(const ThresholdPublicKey& k);
json enc(const TellerKeyShare& s);
json enc(const KeyPair& k);
json enc(const CodePair& p);
json enc(const MixProof& p);
json enc(const ShuffleStep& s);
json enc(const Record& r);
json enc(const MicroMixStep& s);
json enc(const CodeTableRow& r);
json enc(const BallotSheet& s);
json enc(const Ballot& b);
json enc(const CastSession& s);
json enc(const TallyResult& t);
json enc(const Teller& t);
json enc(const std::vector<bool>& bits);
json enc(const std::vector<GroupElement>& xs);

GroupElement element(const json& j, const ParamsPtr& params);
Scalar scalar(const json& j, const ParamsPtr& params);
Ciphertext ciphertext(const json& j, const ParamsPtr& params);
SchnorrProof schnorr(const json& j, const ParamsPtr& params);
EqDlogProof eq_dlog(const json& j, const ParamsPtr& params);
OrProof or_proof(const json& j, const ParamsPtr& params);
DecryptionShare decryption_share(const json& j, const ParamsPtr& params);
PetTranscript pet_transcript(const json& j, const ParamsPtr& params);
Cca2Ciphertext cca2_ciphertext(const json& j, const ParamsPtr& params);
Cca2PublicKey cca2_public_key(const json& j, const ParamsPtr& params);
Cca2SecretKey cca2_secret_key(const json& j, const ParamsPtr& params);
ThresholdPublicKey threshold_key(const json& j, const ParamsPtr& params);
TellerKeyShare teller_key_share(const json& j, const ParamsPtr& params);
KeyPair key_pair(const json& j, const ParamsPtr& params);
CodePair code_pair(const json& j, const ParamsPtr& params);
MixProof mix_proof(const json& j, const ParamsPtr& params);
ShuffleStep shuffle_step(const json& j, const ParamsPtr& params);
Record record(const json& j, const ParamsPtr& params);
MicroMixStep micro_mix_step(const json& j, const ParamsPtr& params);
CodeTableRow table_row(const json& j, const ParamsPtr& params);
BallotSheet ballot_sheet(const json& j);
Ballot ballot(const json& j, const ParamsPtr& params);
CastSession cast_session(const json& j, const ParamsPtr& params);
TallyResult tally_result(const json& j, const ParamsPtr& params);
Teller teller(const json& j, const ParamsPtr& params);
std::vector<bool> bits(const json& j);
std::vector<GroupElement> elements(const json& j, const ParamsPtr& params);

std::vector<DecryptionShare> decryption_shares(const json& j, const ParamsPtr& params);
json enc(const std::vector<DecryptionShare>& shares);

/// Parses text as JSON, raising FormatError instead of the library's
/// exception type.
json parse(std::string_view text);

}  // namespace rcv::ser
