// Command-line front end over the C interface.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "rcv/rcv.h"

namespace {

// Config keys exposed as flags; --code-space sets code_space and so on.
const char* const kConfigKeys[] = {"election_id",     "group",          "group_bits", "voters",
                                   "corrupt_voters",  "options",        "code_space", "code_bits",
                                   "mode",            "tellers",        "threshold",  "corrupt_tellers",
                                   "active_tellers",  "delivery",       "seed",       "lambda",
                                   "pet_failing_voters"};

struct ConfigFlags {
  std::string file;
  std::map<std::string, std::string> values;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", file, "Config file (key = value lines)");
    for (const char* key : kConfigKeys) {
      std::string flag = key;
      for (auto& c : flag)
        if (c == '_') c = '-';
      cmd->add_option("--" + flag, values[key], std::string("Overrides ") + key);
    }
  }

  // Later lines win, so the order is env seed, file, flags.
  std::string text() const {
    std::string out;
    if (const char* seed = std::getenv("RCV_SEED"); seed && *seed) out += std::string("seed = ") + seed + "\n";
    if (!file.empty()) {
      std::ifstream in(file);
      if (!in) throw std::runtime_error("cannot read config file " + file);
      std::ostringstream ss;
      ss << in.rdbuf();
      out += ss.str() + "\n";
    }
    for (const auto& [k, v] : values)
      if (!v.empty()) out += k + " = " + v + "\n";
    return out;
  }
};

int report_error(rcv_status st) {
  std::string msg = rcv_last_error();
  std::string escaped;
  for (char c : msg) {
    if (c == '"' || c == '\\') escaped += '\\';
    escaped += (c == '\n' || c == '\t') ? ' ' : c;
  }
  std::cerr << "{\"error\":\"" << rcv_status_name(st) << "\",\"message\":\"" << escaped << "\"}\n";
  return 2;
}

// Prints a library string and releases it.
void print(char* s) {
  std::cout << s;
  if (*s && s[std::char_traits<char>::length(s) - 1] != '\n') std::cout << "\n";
  rcv_string_free(s);
}

class Handle {
 public:
  ~Handle() { rcv_election_free(e_); }
  rcv_election** out() { return &e_; }
  rcv_election* get() const { return e_; }

 private:
  rcv_election* e_ = nullptr;
};

// Loads the election in dir, runs f, saves it back.
template <class F>
int with_election(const std::string& dir, F&& f) {
  Handle h;
  if (auto st = rcv_election_load(dir.c_str(), h.out()); st != RCV_OK) return report_error(st);
  char* out = nullptr;
  if (auto st = f(h.get(), &out); st != RCV_OK) return report_error(st);
  if (auto st = rcv_election_save(h.get(), dir.c_str()); st != RCV_OK) {
    rcv_string_free(out);
    return report_error(st);
  }
  if (out) print(out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Return-code voting simulator"};
  app.require_subcommand(1);
  std::string dir = "election";

  auto* setup = app.add_subcommand("setup", "Key generation; writes a new election directory");
  ConfigFlags setup_cfg;
  setup_cfg.attach(setup);
  setup->add_option("--dir", dir, "Election directory");

  auto* reg = app.add_subcommand("register", "Code generation and ballot sheet printing");
  reg->add_option("--dir", dir, "Election directory");

  std::string voter, choices, platform = "honest";
  int flip_option = 1;
  auto* cast = app.add_subcommand("cast", "Cast one ballot");
  cast->add_option("--dir", dir, "Election directory");
  cast->add_option("--voter", voter, "Voter id, e.g. voter-1")->required();
  cast->add_option("--choices", choices, "One 0/1 digit per option, e.g. 101")->required();
  cast->add_option("--platform", platform, "honest | flip-consistent | flip-inconsistent")
      ->check(CLI::IsMember({"honest", "flip-consistent", "flip-inconsistent"}));
  cast->add_option("--flip-option", flip_option, "Option a cheating platform flips (1-based)");

  auto* fin = app.add_subcommand("finalize", "Finalize a ballot with the sheet's finalization code");
  fin->add_option("--dir", dir, "Election directory");
  fin->add_option("--voter", voter, "Voter id")->required();

  auto* tally = app.add_subcommand("tally", "Decrypt and count the ballot box");
  tally->add_option("--dir", dir, "Election directory");

  auto* sheet = app.add_subcommand("sheet", "Print a voter's ballot sheet");
  sheet->add_option("--dir", dir, "Election directory");
  sheet->add_option("--voter", voter, "Voter id")->required();

  auto* status = app.add_subcommand("status", "Summarize the election state");
  status->add_option("--dir", dir, "Election directory");

  std::string board_file;
  auto* verify = app.add_subcommand("verify", "Replay and verify a bulletin board");
  verify->add_option("--dir", dir, "Election directory (uses its board.txt)");
  verify->add_option("--board", board_file, "Board file");

  auto* run = app.add_subcommand("run", "Run a complete election in memory");
  ConfigFlags run_cfg;
  run_cfg.attach(run);

  std::uint64_t trials = 1000;
  auto* experiment = app.add_subcommand("experiment", "Security experiments");
  experiment->require_subcommand(1);
  auto* cai = experiment->add_subcommand("cai", "Cheating-platform code-guessing experiment");
  ConfigFlags cai_cfg;
  cai_cfg.attach(cai);
  cai->add_option("--trials", trials, "Number of trials");
  auto* privacy = experiment->add_subcommand("privacy", "Paired-run vote privacy experiment");
  ConfigFlags privacy_cfg;
  privacy_cfg.attach(privacy);
  privacy->add_option("--trials", trials, "Number of paired trials");

  std::string demo_seed = "rcv";
  unsigned demo_bits = 256;
  bool demo_json = false;
  auto* demo = app.add_subcommand("attack-demo", "Malformed-query attack on the OT-based scheme");
  demo->add_option("--seed", demo_seed, "Seed");
  demo->add_option("--group-bits", demo_bits, "Group size in bits");
  demo->add_flag("--json", demo_json, "JSON report instead of text");

  CLI11_PARSE(app, argc, argv);

  try {
    char* out = nullptr;
    if (setup->parsed()) {
      Handle h;
      if (auto st = rcv_election_create(setup_cfg.text().c_str(), h.out()); st != RCV_OK) return report_error(st);
      if (auto st = rcv_election_save(h.get(), dir.c_str()); st != RCV_OK) return report_error(st);
      if (auto st = rcv_election_status(h.get(), &out); st != RCV_OK) return report_error(st);
      print(out);
      return 0;
    }
    if (reg->parsed()) {
      return with_election(dir, [](rcv_election* e, char** o) {
        const rcv_status st = rcv_election_register(e);
        return st == RCV_OK ? rcv_election_status(e, o) : st;
      });
    }
    if (cast->parsed()) {
      const rcv_platform p = platform == "honest"            ? RCV_PLATFORM_HONEST
                             : platform == "flip-consistent" ? RCV_PLATFORM_FLIP_CONSISTENT
                                                             : RCV_PLATFORM_FLIP_INCONSISTENT;
      return with_election(dir, [&](rcv_election* e, char** o) {
        return rcv_election_cast(e, voter.c_str(), choices.c_str(), p, flip_option, o);
      });
    }
    if (fin->parsed())
      return with_election(dir, [&](rcv_election* e, char** o) { return rcv_election_finalize(e, voter.c_str(), o); });
    if (tally->parsed()) return with_election(dir, [](rcv_election* e, char** o) { return rcv_election_tally(e, o); });
    if (sheet->parsed())
      return with_election(dir, [&](rcv_election* e, char** o) { return rcv_election_sheet(e, voter.c_str(), o); });
    if (status->parsed()) return with_election(dir, [](rcv_election* e, char** o) { return rcv_election_status(e, o); });
    if (verify->parsed()) {
      const std::string path = board_file.empty() ? dir + "/board.txt" : board_file;
      const rcv_status st = rcv_verify_board_file(path.c_str(), &out);
      if (st == RCV_OK || st == RCV_ERR_VERIFY_FAILED) {
        print(out);
        return st == RCV_OK ? 0 : 1;
      }
      return report_error(st);
    }
    if (run->parsed()) {
      if (auto st = rcv_run_election(run_cfg.text().c_str(), &out); st != RCV_OK) return report_error(st);
      print(out);
      return 0;
    }
    if (cai->parsed()) {
      if (auto st = rcv_experiment_cai(cai_cfg.text().c_str(), trials, &out); st != RCV_OK) return report_error(st);
      print(out);
      return 0;
    }
    if (privacy->parsed()) {
      if (auto st = rcv_experiment_privacy(privacy_cfg.text().c_str(), trials, &out); st != RCV_OK)
        return report_error(st);
      print(out);
      return 0;
    }
    if (demo->parsed()) {
      if (auto st = rcv_attack_demo(demo_seed.c_str(), demo_bits, demo_json ? 1 : 0, &out); st != RCV_OK)
        return report_error(st);
      print(out);
      return 0;
    }
  } catch (const std::exception& ex) {
    std::cerr << "{\"error\":\"io\",\"message\":\"" << ex.what() << "\"}\n";
    return 2;
  }
  return 0;
}
