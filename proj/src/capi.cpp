#include "rcv/rcv.h"

#include <cstring>
#include <filesystem>

#include <json.hpp>

#include "rcv/error.hpp"
#include "rcv/harness.hpp"
#include "rcv/ot_attack.hpp"

struct rcv_election {
  rcv::Election e;
};

namespace {

using nlohmann::json;

thread_local std::string last_error;

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

rcv_status fail(rcv_status st, const std::string& msg) {
  last_error = msg;
  return st;
}

// Runs f, translating exceptions into status codes.
template <class F>
rcv_status guarded(F&& f) {
  last_error.clear();
  try {
    return f();
  } catch (const rcv::InvalidArgument& e) {
    return fail(RCV_ERR_INVALID_ARGUMENT, e.what());
  } catch (const rcv::FormatError& e) {
    return fail(RCV_ERR_FORMAT, e.what());
  } catch (const rcv::ProofError& e) {
    return fail(RCV_ERR_PROOF, e.what());
  } catch (const rcv::ProtocolError& e) {
    return fail(RCV_ERR_PROTOCOL, e.what());
  } catch (const rcv::MalformedPlaintext& e) {
    return fail(RCV_ERR_MALFORMED_PLAINTEXT, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(RCV_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(RCV_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(RCV_ERR_INTERNAL, "unknown failure");
  }
}

rcv_status emit(char** out, const std::string& s) {
  if (!out) return fail(RCV_ERR_INVALID_ARGUMENT, "null output pointer");
  *out = dup(s);
  return *out ? RCV_OK : fail(RCV_ERR_INTERNAL, "out of memory");
}

rcv::ElectionConfig config_from(const char* text) { return rcv::ElectionConfig::parse(text ? text : ""); }

std::vector<bool> parse_choices(const char* s) {
  if (!s) throw rcv::InvalidArgument("choices must not be null");
  std::vector<bool> out;
  for (const char* p = s; *p; ++p) {
    if (*p != '0' && *p != '1') throw rcv::InvalidArgument("choices must be a string of 0 and 1");
    out.push_back(*p == '1');
  }
  return out;
}

std::string need(const char* s, const char* what) {
  if (!s) throw rcv::InvalidArgument(std::string(what) + " must not be null");
  return s;
}

rcv_status verify_report(const std::optional<std::string>& problem, char** out) {
  const json j{{"valid", !problem}, {"reason", problem.value_or("")}};
  const rcv_status st = emit(out, j.dump());
  if (st != RCV_OK) return st;
  return problem ? fail(RCV_ERR_VERIFY_FAILED, *problem) : RCV_OK;
}

}  // namespace

extern "C" {

const char* rcv_version(void) { return "1.0.0"; }

const char* rcv_last_error(void) { return last_error.c_str(); }

const char* rcv_status_name(rcv_status status) {
  switch (status) {
    case RCV_OK: return "ok";
    case RCV_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case RCV_ERR_FORMAT: return "format";
    case RCV_ERR_PROOF: return "proof";
    case RCV_ERR_PROTOCOL: return "protocol";
    case RCV_ERR_MALFORMED_PLAINTEXT: return "malformed-plaintext";
    case RCV_ERR_IO: return "io";
    case RCV_ERR_VERIFY_FAILED: return "verify-failed";
    case RCV_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void rcv_string_free(char* s) { std::free(s); }

rcv_status rcv_config_normalize(const char* config_text, char** out_text) {
  return guarded([&] {
    const auto c = config_from(config_text);
    c.validate();
    return emit(out_text, c.to_text());
  });
}

rcv_status rcv_election_create(const char* config_text, rcv_election** out) {
  return guarded([&] {
    if (!out) return fail(RCV_ERR_INVALID_ARGUMENT, "null output pointer");
    *out = new rcv_election{rcv::Election::create(config_from(config_text))};
    return RCV_OK;
  });
}

rcv_status rcv_election_load(const char* dir, rcv_election** out) {
  return guarded([&] {
    if (!out) return fail(RCV_ERR_INVALID_ARGUMENT, "null output pointer");
    const std::string d = need(dir, "dir");
    if (!std::filesystem::exists(d + "/state.json")) return fail(RCV_ERR_IO, "no election state in " + d);
    *out = new rcv_election{rcv::Election::load(d)};
    return RCV_OK;
  });
}

rcv_status rcv_election_save(const rcv_election* e, const char* dir) {
  return guarded([&] {
    if (!e) return fail(RCV_ERR_INVALID_ARGUMENT, "null election");
    e->e.save(need(dir, "dir"));
    return RCV_OK;
  });
}

void rcv_election_free(rcv_election* e) { delete e; }

rcv_status rcv_election_register(rcv_election* e) {
  return guarded([&] {
    if (!e) return fail(RCV_ERR_INVALID_ARGUMENT, "null election");
    e->e.register_voters();
    return RCV_OK;
  });
}

rcv_status rcv_election_cast(rcv_election* e, const char* voter_id, const char* choices, rcv_platform platform,
                             int flip_option, char** out_report) {
  return guarded([&] {
    if (!e) return fail(RCV_ERR_INVALID_ARGUMENT, "null election");
    rcv::Platform p;
    switch (platform) {
      case RCV_PLATFORM_HONEST: p = rcv::Platform::Honest; break;
      case RCV_PLATFORM_FLIP_CONSISTENT: p = rcv::Platform::FlipConsistent; break;
      case RCV_PLATFORM_FLIP_INCONSISTENT: p = rcv::Platform::FlipInconsistent; break;
      default: return fail(RCV_ERR_INVALID_ARGUMENT, "unknown platform");
    }
    const std::string id = need(voter_id, "voter_id");
    const auto out = e->e.cast(id, parse_choices(choices), p, flip_option);
    const json j{{"voter", id},
                 {"state", rcv::to_string(out.state)},
                 {"reason", out.reason},
                 {"codes", out.codes},
                 {"delivery", out.delivered_via == rcv::Delivery::InBand ? "in-band" : "out-of-band"},
                 {"voter_accepts", out.voter_accepts}};
    return emit(out_report, j.dump());
  });
}

rcv_status rcv_election_finalize(rcv_election* e, const char* voter_id, char** out_report) {
  return guarded([&] {
    if (!e) return fail(RCV_ERR_INVALID_ARGUMENT, "null election");
    const std::string id = need(voter_id, "voter_id");
    const auto out = e->e.finalize(id);
    const json j{{"voter", id}, {"confirmation", out.confirmation}, {"voter_accepts", out.voter_accepts}};
    return emit(out_report, j.dump());
  });
}

rcv_status rcv_election_tally(rcv_election* e, char** out_report) {
  return guarded([&] {
    if (!e) return fail(RCV_ERR_INVALID_ARGUMENT, "null election");
    const auto t = e->e.tally();
    const json j{{"counts", t.counts}, {"ballots", t.entries.size()}, {"rejected", t.rejected}};
    return emit(out_report, j.dump());
  });
}

rcv_status rcv_election_sheet(const rcv_election* e, const char* voter_id, char** out_text) {
  return guarded([&] {
    if (!e) return fail(RCV_ERR_INVALID_ARGUMENT, "null election");
    return emit(out_text, rcv::sheet_to_text(e->e.sheet(need(voter_id, "voter_id"))));
  });
}

rcv_status rcv_election_board(const rcv_election* e, char** out_text) {
  return guarded([&] {
    if (!e) return fail(RCV_ERR_INVALID_ARGUMENT, "null election");
    return emit(out_text, e->e.board().serialize());
  });
}

rcv_status rcv_election_status(const rcv_election* e, char** out_report) {
  return guarded([&] {
    if (!e) return fail(RCV_ERR_INVALID_ARGUMENT, "null election");
    json sessions = json::object();
    if (e->e.registered())
      for (const auto& [id, s] : e->e.server().sessions()) sessions[id] = rcv::to_string(s.state);
    const json j{{"election_id", e->e.config().election_id},
                 {"registered", e->e.registered()},
                 {"voters", e->e.config().voter_ids()},
                 {"sessions", sessions},
                 {"tallied", e->e.tally_result().has_value()},
                 {"board_entries", e->e.board().entries().size()}};
    return emit(out_report, j.dump());
  });
}

rcv_status rcv_verify_board_file(const char* path, char** out_report) {
  return guarded([&] { return verify_report(rcv::verify_board_file(need(path, "path")), out_report); });
}

rcv_status rcv_verify_board_text(const char* text, char** out_report) {
  return guarded([&] {
    std::optional<std::string> problem;
    try {
      problem = rcv::verify_board(rcv::Board::parse(need(text, "text")));
    } catch (const rcv::FormatError& ex) {
      problem = std::string("unreadable board: ") + ex.what();
    }
    return verify_report(problem, out_report);
  });
}

rcv_status rcv_run_election(const char* config_text, char** out_report) {
  return guarded([&] {
    const auto r = rcv::run_election(config_from(config_text));
    const json j{{"finalized", r.finalized},
                 {"cancelled", r.cancelled},
                 {"rejected_by_voter", r.rejected_by_voter},
                 {"all_honest_accepted", r.all_honest_accepted},
                 {"counts", r.counts},
                 {"expected_counts", r.expected_counts},
                 {"board_verified", r.board_verified}};
    return emit(out_report, j.dump());
  });
}

rcv_status rcv_experiment_cai(const char* config_text, uint64_t trials, char** out_report) {
  return guarded([&] { return emit(out_report, rcv::experiment_cai(config_from(config_text), trials).to_json()); });
}

rcv_status rcv_experiment_privacy(const char* config_text, uint64_t trials, char** out_report) {
  return guarded(
      [&] { return emit(out_report, rcv::experiment_privacy(config_from(config_text), trials).to_json()); });
}

rcv_status rcv_attack_demo(const char* seed, unsigned group_bits, int as_json, char** out_report) {
  return guarded([&] {
    const auto params = rcv::generate_params(group_bits ? group_bits : 256, "rcv-group");
    const auto d = rcv::run_attack_demo(params, seed ? seed : "rcv");
    return emit(out_report, as_json ? d.to_json() : d.to_text());
  });
}

}  // extern "C"
