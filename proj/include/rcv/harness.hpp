#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rcv/board.hpp"
#include "rcv/codegen.hpp"
#include "rcv/protocol.hpp"

namespace rcv {

enum class Delivery { InBand, OutOfBand };

/// Election configuration, read from a key=value file (see README).
struct ElectionConfig {
  std::string election_id = "election";
  /// "" (generate from group_bits), "rfc3526-2048", "rfc3526-3072", or
  /// an explicit "p=..;q=..;g=.." string.
  std::string group;
  unsigned group_bits = 64;
  int voters = 4;
  int corrupt_voters = 0;
  int options = 2;
  std::uint64_t code_space = 16;
  /// 0 picks the smallest l with 2^l >= m.
  int code_bits = 0;
  CodeMode mode = CodeMode::Sparse;
  int tellers = 3;
  int threshold = 2;
  std::vector<int> corrupt_tellers;
  std::vector<int> active_tellers;
  Delivery delivery = Delivery::InBand;
  std::string seed = "rcv";
  int lambda = 16;
  /// Voters whose platform sends an inconsistent btilde.
  std::vector<std::string> pet_failing_voters;

  static ElectionConfig parse(std::string_view text);
  static ElectionConfig load(const std::string& path);
  std::string to_text() const;
  /// Throws InvalidArgument with the violated condition.
  void validate() const;
  int effective_code_bits() const;
  ParamsPtr make_params() const;
  std::vector<std::string> voter_ids() const;
};

enum class Platform { Honest, FlipConsistent, FlipInconsistent };

struct CastOutcome {
  SessionState state = SessionState::Submitted;
  std::vector<std::uint64_t> codes;
  Delivery delivered_via = Delivery::InBand;
  bool voter_accepts = false;
  std::string reason;
};

struct FinalizeOutcome {
  std::uint64_t confirmation = 0;
  bool voter_accepts = false;
};

/// One election: authorities, printed sheets, server and board.
class Election {
 public:
  /// Key generation; publishes the params and key entries.
  static Election create(const ElectionConfig& config, bool publish = true);

  /// Code generation and printing; publishes the codegen transcript and
  /// the code table.
  void register_voters(const CodegenHooks& hooks = {});
  CastOutcome cast(const std::string& voter_id, const std::vector<bool>& choices, Platform platform = Platform::Honest,
                   int flip_option = 1);
  FinalizeOutcome finalize(const std::string& voter_id);
  TallyResult tally();

  const ElectionConfig& config() const { return config_; }
  const ElectionPublic& pub() const { return setup_->pub; }
  const Board& board() const { return board_; }
  const std::vector<BallotSheet>& sheets() const { return sheets_; }
  const BallotSheet& sheet(const std::string& voter_id) const;
  const VotingServer& server() const;
  std::vector<Teller>& tellers() { return setup_->secrets.tellers; }
  bool registered() const { return server_.has_value(); }
  const std::optional<TallyResult>& tally_result() const { return tally_; }
  /// Choices each voter intended, as entered in cast().
  const std::map<std::string, std::vector<bool>>& intents() const { return intents_; }

  std::string state_json() const;
  static Election from_state(std::string_view state_json, Board board);
  void save(const std::string& dir) const;
  static Election load(const std::string& dir);

 private:
  Election(ElectionConfig config, bool publish);
  Rng next_rng(const std::string& label);
  void publish(std::string_view kind, const std::string& payload);

  ElectionConfig config_;
  bool publish_ = true;
  std::uint64_t op_ = 0;
  std::optional<SetupResult> setup_;
  std::vector<BallotSheet> sheets_;
  std::map<std::string, std::string> auth_;
  std::vector<CodeTableRow> table_;
  std::optional<VotingServer> server_;
  std::optional<TallyResult> tally_;
  std::map<std::string, std::vector<bool>> intents_;
  Board board_;
};

/// Replays a board: chain, keys, code generation, every cast session and
/// the tally. Returns the first problem found.
std::optional<std::string> verify_board(const Board& board);
std::optional<std::string> verify_board_file(const std::string& path);

struct RunReport {
  int finalized = 0;
  int cancelled = 0;
  int rejected_by_voter = 0;
  bool all_honest_accepted = true;
  std::vector<std::uint64_t> counts;
  std::vector<std::uint64_t> expected_counts;
  bool board_verified = false;
};

/// Full election with pseudo-random choices derived from the seed.
RunReport run_election(const ElectionConfig& config, Election* out = nullptr);

struct ExperimentReport {
  std::string name;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double rate = 0;
  double bound = 0;
  double slack = 0;
  bool pass = false;
  double seconds = 0;
  std::string to_json() const;
};

/// 1 / (m - n - n').
double cai_bound(std::uint64_t m, int n, int n_corrupt);

/// Cheating-platform experiment.
ExperimentReport experiment_cai(const ElectionConfig& config, std::uint64_t trials);

struct DistinguisherResult {
  std::string name;
  bool violates_assumptions = false;
  std::uint64_t ones_p0 = 0;
  std::uint64_t ones_p1 = 0;
  double advantage = 0;
  /// Standard error of the mean paired difference.
  double sigma = 0;
  bool pass = false;
};

struct PrivacyReport {
  std::uint64_t trials = 0;
  std::vector<DistinguisherResult> distinguishers;
  bool pass = false;
  double seconds = 0;
  std::string to_json() const;
};

/// Paired P0/P1 elections in which two honest voters swap their votes.
PrivacyReport experiment_privacy(const ElectionConfig& config, std::uint64_t trials);

}  // namespace rcv
