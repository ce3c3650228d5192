#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rcv/elgamal.hpp"
#include "rcv/encoding.hpp"

namespace rcv {

/// Public keys used during code generation: pk_e for choices, pk_c for
/// codes, pk_p for the printing facility.
struct CodegenKeys {
  GroupElement pk_e;
  GroupElement pk_c;
  GroupElement pk_p;
};

/// (cenc delta_j(c), penc c) for one code c.
struct CodePair {
  Ciphertext code;
  Ciphertext print;
  bool operator==(const CodePair& rhs) const { return code == rhs.code && print == rhs.print; }
};

/// Deterministic list for option j: entry c-1 holds the pair for code c,
/// both encrypted with randomness 1.
std::vector<CodePair> generate_code_lists(const CodeEncoding& codes, int option, const CodegenKeys& keys);

/// Plaintext printed for code c (and for the order markers 0/1 as 1/2).
GroupElement print_plaintext(const ParamsPtr& params, std::uint64_t code);

// ---- paired shuffle ---------------------------------------------------------

/// Cut-and-choose shuffle argument. Each shadow is an independent shuffle
/// of the input; the challenge bit for a shadow opens either input->shadow
/// (bit 0) or shadow->output (bit 1). Openings list, for every position i,
/// the source index and the two re-encryption exponents.
struct ShuffleOpening {
  std::vector<std::size_t> permutation;
  std::vector<Scalar> code_r;
  std::vector<Scalar> print_r;
};

struct MixProof {
  std::vector<std::vector<CodePair>> shadows;
  std::vector<ShuffleOpening> openings;
};

/// output[i] = reenc(input[permutation[i]]) with the given exponents.
std::vector<CodePair> apply_shuffle(const CodegenKeys& keys, const std::vector<CodePair>& input,
                                    const ShuffleOpening& opening);

struct ShuffleResult {
  std::vector<CodePair> output;
  MixProof proof;
};

/// `context` binds the proof to its place in the pipeline.
ShuffleResult paired_shuffle(const CodegenKeys& keys, const std::vector<CodePair>& input, int lambda,
                             const std::string& context, Rng& rng);
/// Same, with the permutation and exponents of the real mix supplied.
ShuffleResult paired_shuffle(const CodegenKeys& keys, const std::vector<CodePair>& input,
                             const ShuffleOpening& mix, int lambda, const std::string& context, Rng& rng);
bool verify_shuffle(const CodegenKeys& keys, const std::vector<CodePair>& input, const std::vector<CodePair>& output,
                    const MixProof& proof, int lambda, const std::string& context);

// ---- records and micro-mixes ------------------------------------------------

/// Eight ciphertexts: (penc 0, penc c', penc 1, penc c'', eenc 1,
/// cenc delta(c'), eenc gamma(j), cenc delta(c'')).
using Record = std::vector<Ciphertext>;
constexpr std::size_t kRecordSlots = 8;

const GroupElement& slot_key(const CodegenKeys& keys, std::size_t slot);
/// Exchanges the two halves: (2,3,0,1,6,7,4,5).
Record swap_record(const Record& r);

/// Records for every voter (voter-major, then option), using codes 2v and
/// 2v+1 of each option's final shuffled list. Throws InvalidArgument when
/// a list holds fewer than 2n codes.
std::vector<Record> assemble_records(const std::vector<std::vector<CodePair>>& shuffled, const OptionEncoding& options,
                                     const CodegenKeys& keys, int voters);

struct MicroMixResult {
  Record output;
  OrProof proof;
};

MicroMixResult micro_mix(const CodegenKeys& keys, const Record& input, bool flip, const std::string& context,
                         Rng& rng);
bool verify_micro_mix(const CodegenKeys& keys, const Record& input, const Record& output, const OrProof& proof,
                      const std::string& context);

// ---- tables and sheets ------------------------------------------------------

struct Cell {
  Ciphertext choice;
  Ciphertext code;
  bool operator==(const Cell& rhs) const { return choice == rhs.choice && code == rhs.code; }
};

struct CodeTableRow {
  std::string voter_id;
  std::string fin_commitment;
  Ciphertext conf_ciphertext;
  /// cells[i] = {u_i^0, u_i^1}.
  std::vector<std::array<Cell, 2>> cells;
};

struct BallotSheet {
  std::string voter_id;
  std::string auth_code;
  std::string finalization_code;
  std::uint64_t confirmation_code = 0;
  std::vector<bool> flip_bits;
  /// return_codes[i] = {c_i^0, c_i^1}.
  std::vector<std::array<std::uint64_t, 2>> return_codes;
};

std::string sheet_to_text(const BallotSheet& sheet);

struct FinConf {
  std::string finalization_code;
  std::string fin_commitment;
  std::uint64_t confirmation_code = 0;
  Ciphertext conf_ciphertext;
};

/// Hash commitment H(voter, code); the code itself carries ~130 random bits.
std::string commit_finalization(const std::string& voter_id, const std::string& finalization_code);
bool open_finalization(const std::string& voter_id, const std::string& finalization_code,
                       const std::string& commitment);
FinConf generate_fin_conf(const ParamsPtr& params, const std::string& voter_id, const GroupElement& pk_c, Rng& rng);
/// Confirmation codes are drawn from [1, conf_code_limit].
std::uint64_t conf_code_limit(const GroupParams& params);

/// Lowercase hex SHA-256 of an authentication code, as kept by the server.
std::string auth_digest(const std::string& auth_code);

// ---- pipeline ---------------------------------------------------------------

/// Everything a verifier needs besides the transcript.
struct CodegenSetup {
  OptionEncoding options;
  CodeEncoding codes;
  CodegenKeys keys;
  std::vector<std::string> voter_ids;
  std::vector<int> tellers;
  int lambda = 16;
};

struct ShuffleStep {
  int teller = 0;
  int option = 0;
  std::vector<CodePair> output;
  MixProof proof;
};

struct MicroMixStep {
  int teller = 0;
  std::vector<Record> output;
  std::vector<OrProof> proofs;
};

struct CodegenTranscript {
  /// Option-major; within an option, tellers in setup order.
  std::vector<ShuffleStep> shuffles;
  std::vector<MicroMixStep> micro_mixes;
  std::vector<CodeTableRow> table;
};

struct CodegenHooks {
  /// Overrides a teller's flip bit for (voter index, option).
  std::function<std::optional<bool>(int teller, int voter, int option)> force_flip;
  std::function<void(ShuffleStep&)> tamper_shuffle;
  std::function<void(MicroMixStep&)> tamper_micro_mix;
};

struct CodegenResult {
  CodegenTranscript transcript;
  std::vector<BallotSheet> sheets;
};

std::string shuffle_context(int option, int teller);
std::string micro_mix_context(int teller, int voter, int option);

/// Runs the teller pipeline and the printing facility's decryption.
CodegenResult generate_code_tables(const CodegenSetup& setup, const KeyPair& printing, Rng& rng,
                                   const CodegenHooks& hooks = {});

/// Printing facility: decrypts the penc slots of the final records and
/// recovers each flip bit from the position of marker 0.
std::vector<BallotSheet> split_outputs(const CodegenSetup& setup, const std::vector<Record>& final_records,
                                       const std::vector<FinConf>& fin_conf, const Scalar& printing_sk, Rng& rng);

std::vector<CodeTableRow> table_from_records(const CodegenSetup& setup, const std::vector<Record>& final_records,
                                             const std::vector<FinConf>& fin_conf);

/// Reason for rejection, or nullopt if the transcript checks out.
std::optional<std::string> check_codegen(const CodegenSetup& setup, const CodegenTranscript& transcript);
bool verify_codegen(const CodegenSetup& setup, const CodegenTranscript& transcript);

}  // namespace rcv
