#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rcv/rcv.h"

namespace {

// Takes ownership of a library string.
std::string take(char* s) {
  REQUIRE(s != nullptr);
  std::string out(s);
  rcv_string_free(s);
  return out;
}

const char* kConfig =
    "election_id = capi\nvoters = 3\noptions = 2\ncode_space = 8\ntellers = 3\nthreshold = 2\nlambda = 2\n"
    "seed = capi-seed\n";

bool contains(const std::string& s, const std::string& needle) { return s.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("status reporting") {
  CHECK(std::string(rcv_status_name(RCV_OK)) == "ok");
  CHECK(std::string(rcv_status_name(RCV_ERR_VERIFY_FAILED)) == "verify-failed");
  CHECK(std::string(rcv_version()).size() > 0);

  rcv_election* e = nullptr;
  CHECK(rcv_election_create("voters = 4\ncode_space = 8\n", &e) == RCV_ERR_INVALID_ARGUMENT);
  CHECK(e == nullptr);
  CHECK(contains(rcv_last_error(), "code_space"));
  CHECK(rcv_election_create("bogus = 1\n", &e) == RCV_ERR_INVALID_ARGUMENT);
  CHECK(rcv_election_create(kConfig, nullptr) == RCV_ERR_INVALID_ARGUMENT);
  CHECK(rcv_election_register(nullptr) == RCV_ERR_INVALID_ARGUMENT);
  CHECK(rcv_election_load("/nonexistent/rcv", &e) == RCV_ERR_IO);

  char* text = nullptr;
  REQUIRE(rcv_config_normalize(kConfig, &text) == RCV_OK);
  CHECK(contains(take(text), "voters = 3"));
  CHECK(std::string(rcv_last_error()).empty());
}

TEST_CASE("election lifecycle through the C interface") {
  const auto dir = std::filesystem::temp_directory_path() / "rcv-capi-test";
  std::filesystem::remove_all(dir);
  rcv_election* e = nullptr;
  REQUIRE(rcv_election_create(kConfig, &e) == RCV_OK);
  char* out = nullptr;
  CHECK(rcv_election_cast(e, "voter-1", "10", RCV_PLATFORM_HONEST, 1, &out) == RCV_ERR_PROTOCOL);
  REQUIRE(rcv_election_register(e) == RCV_OK);
  CHECK(rcv_election_register(e) == RCV_ERR_PROTOCOL);
  REQUIRE(rcv_election_save(e, dir.string().c_str()) == RCV_OK);
  rcv_election_free(e);

  REQUIRE(rcv_election_load(dir.string().c_str(), &e) == RCV_OK);
  REQUIRE(rcv_election_sheet(e, "voter-1", &out) == RCV_OK);
  CHECK(contains(take(out), "voter-1"));
  CHECK(rcv_election_sheet(e, "voter-9", &out) == RCV_ERR_INVALID_ARGUMENT);

  REQUIRE(rcv_election_cast(e, "voter-1", "10", RCV_PLATFORM_HONEST, 1, &out) == RCV_OK);
  auto report = take(out);
  CHECK(contains(report, "\"state\":\"codes-sent\""));
  CHECK(contains(report, "\"voter_accepts\":true"));
  CHECK(rcv_election_cast(e, "voter-1", "10", RCV_PLATFORM_HONEST, 1, &out) == RCV_ERR_PROTOCOL);
  CHECK(rcv_election_cast(e, "voter-2", "1x", RCV_PLATFORM_HONEST, 1, &out) == RCV_ERR_INVALID_ARGUMENT);
  CHECK(rcv_election_cast(e, "voter-2", "10", static_cast<rcv_platform>(9), 1, &out) == RCV_ERR_INVALID_ARGUMENT);

  REQUIRE(rcv_election_cast(e, "voter-2", "01", RCV_PLATFORM_FLIP_INCONSISTENT, 1, &out) == RCV_OK);
  CHECK(contains(take(out), "\"state\":\"cancelled\""));
  CHECK(rcv_election_finalize(e, "voter-2", &out) == RCV_ERR_PROTOCOL);

  REQUIRE(rcv_election_finalize(e, "voter-1", &out) == RCV_OK);
  CHECK(contains(take(out), "\"voter_accepts\":true"));
  REQUIRE(rcv_election_tally(e, &out) == RCV_OK);
  CHECK(contains(take(out), "\"counts\":[1,0]"));
  REQUIRE(rcv_election_status(e, &out) == RCV_OK);
  report = take(out);
  CHECK(contains(report, "\"voter-1\":\"finalized\""));
  CHECK(contains(report, "\"tallied\":true"));
  REQUIRE(rcv_election_save(e, dir.string().c_str()) == RCV_OK);
  REQUIRE(rcv_election_board(e, &out) == RCV_OK);
  const std::string board = take(out);
  rcv_election_free(e);

  const auto board_path = (dir / "board.txt").string();
  REQUIRE(rcv_verify_board_file(board_path.c_str(), &out) == RCV_OK);
  CHECK(contains(take(out), "\"valid\":true"));
  REQUIRE(rcv_verify_board_text(board.c_str(), &out) == RCV_OK);
  take(out);

  std::string tampered = board;
  tampered[tampered.size() / 2] ^= 1;
  CHECK(rcv_verify_board_text(tampered.c_str(), &out) == RCV_ERR_VERIFY_FAILED);
  CHECK(contains(take(out), "\"valid\":false"));
  CHECK(std::string(rcv_last_error()).size() > 0);
  {
    std::ofstream f(board_path, std::ios::binary | std::ios::trunc);
    f << tampered;
  }
  CHECK(rcv_verify_board_file(board_path.c_str(), &out) == RCV_ERR_VERIFY_FAILED);
  take(out);
  std::filesystem::remove_all(dir);
}

TEST_CASE("reports from runs, experiments and the attack demo") {
  char* out = nullptr;
  REQUIRE(rcv_run_election(kConfig, &out) == RCV_OK);
  auto r = take(out);
  CHECK(contains(r, "\"board_verified\":true"));
  CHECK(contains(r, "\"finalized\":3"));

  const char* cai = "voters = 2\ncorrupt_voters = 1\noptions = 1\ncode_space = 5\ntellers = 2\nthreshold = 2\nlambda = 1\n";
  REQUIRE(rcv_experiment_cai(cai, 20, &out) == RCV_OK);
  r = take(out);
  CHECK(contains(r, "\"experiment\":\"cai\""));
  CHECK(contains(r, "\"trials\":20"));
  CHECK(rcv_experiment_cai(cai, 0, &out) == RCV_ERR_INVALID_ARGUMENT);

  REQUIRE(rcv_experiment_privacy("voters = 2\noptions = 1\ncode_space = 5\ntellers = 2\nlambda = 1\n", 4, &out) ==
          RCV_OK);
  CHECK(contains(take(out), "\"distinguishers\""));

  REQUIRE(rcv_attack_demo("seed", 128, 1, &out) == RCV_OK);
  r = take(out);
  CHECK(contains(r, "\"attack_succeeds\":true"));
  CHECK(contains(r, "\"countermeasure_rejects_malicious\":true"));
  REQUIRE(rcv_attack_demo("seed", 128, 0, &out) == RCV_OK);
  CHECK(contains(take(out), "malicious run"));
}
