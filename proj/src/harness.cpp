#include "rcv/harness.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "rcv/error.hpp"
#include "rcv/serialize.hpp"

namespace rcv {

using ser::json;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

long parse_long(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long x = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw InvalidArgument("config: " + key + " must be an integer");
  }
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const auto& s : split_list(v)) out.push_back(static_cast<int>(parse_long(key, s)));
  return out;
}

template <class T>
std::string join(const std::vector<T>& xs) {
  std::ostringstream out;
  for (std::size_t i = 0; i < xs.size(); ++i) out << (i ? "," : "") << xs[i];
  return out.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << data;
}

std::vector<bool> random_choices(Rng& rng, int k) {
  std::vector<bool> v;
  for (int i = 0; i < k; ++i) v.push_back(rng.next_bit());
  return v;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json params_payload(const ElectionConfig& c, const GroupParams& params) {
  return json{{"election_id", c.election_id},
              {"params", params.to_text()},
              {"options", c.options},
              {"code_bits", c.effective_code_bits()},
              {"code_space", c.code_space},
              {"mode", to_string(c.mode)},
              {"tellers", c.tellers},
              {"threshold", c.threshold},
              {"lambda", c.lambda},
              {"voters", c.voter_ids()},
              {"delivery", c.delivery == Delivery::InBand ? "in-band" : "out-of-band"}};
}

std::optional<int> culprit_of(const std::string& reason) {
  static const std::regex re("teller-([0-9]+)");
  std::smatch m;
  if (std::regex_search(reason, m, re)) return std::stoi(m[1]);
  return std::nullopt;
}

json dealings(const std::vector<std::vector<GroupElement>>& d) {
  json out = json::array();
  for (const auto& v : d) out.push_back(ser::enc(v));
  return out;
}

std::vector<std::vector<GroupElement>> parse_dealings(const json& j, const ParamsPtr& params) {
  std::vector<std::vector<GroupElement>> out;
  for (const auto& v : j) out.push_back(ser::elements(v, params));
  return out;
}

}  // namespace

// ---- config -----------------------------------------------------------------

ElectionConfig ElectionConfig::parse(std::string_view text) {
  ElectionConfig c;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));
    if (key == "election_id") c.election_id = v;
    else if (key == "group") c.group = v;
    else if (key == "group_bits") c.group_bits = static_cast<unsigned>(parse_long(key, v));
    else if (key == "voters") c.voters = static_cast<int>(parse_long(key, v));
    else if (key == "corrupt_voters") c.corrupt_voters = static_cast<int>(parse_long(key, v));
    else if (key == "options") c.options = static_cast<int>(parse_long(key, v));
    else if (key == "code_space") c.code_space = static_cast<std::uint64_t>(parse_long(key, v));
    else if (key == "code_bits") c.code_bits = static_cast<int>(parse_long(key, v));
    else if (key == "mode") c.mode = code_mode_from_string(v);
    else if (key == "tellers") c.tellers = static_cast<int>(parse_long(key, v));
    else if (key == "threshold") c.threshold = static_cast<int>(parse_long(key, v));
    else if (key == "corrupt_tellers") c.corrupt_tellers = parse_int_list(key, v);
    else if (key == "active_tellers") c.active_tellers = parse_int_list(key, v);
    else if (key == "delivery") {
      if (v == "in-band") c.delivery = Delivery::InBand;
      else if (v == "out-of-band") c.delivery = Delivery::OutOfBand;
      else throw InvalidArgument("config: delivery must be in-band or out-of-band");
    } else if (key == "seed") c.seed = v;
    else if (key == "lambda") c.lambda = static_cast<int>(parse_long(key, v));
    else if (key == "pet_failing_voters") c.pet_failing_voters = split_list(v);
    else if (key == "revoting") {
      if (v != "false" && v != "no" && v != "0")
        throw InvalidArgument("config: re-voting is not supported; every voter casts exactly once");
    } else {
      throw InvalidArgument("config: unknown key '" + key + "'");
    }
  }
  return c;
}

ElectionConfig ElectionConfig::load(const std::string& path) { return parse(read_file(path)); }

std::string ElectionConfig::to_text() const {
  std::ostringstream out;
  out << "election_id = " << election_id << "\n";
  if (!group.empty()) out << "group = " << group << "\n";
  out << "group_bits = " << group_bits << "\n";
  out << "voters = " << voters << "\n";
  out << "corrupt_voters = " << corrupt_voters << "\n";
  out << "options = " << options << "\n";
  out << "code_space = " << code_space << "\n";
  out << "code_bits = " << code_bits << "\n";
  out << "mode = " << to_string(mode) << "\n";
  out << "tellers = " << tellers << "\n";
  out << "threshold = " << threshold << "\n";
  out << "corrupt_tellers = " << join(corrupt_tellers) << "\n";
  out << "active_tellers = " << join(active_tellers) << "\n";
  out << "delivery = " << (delivery == Delivery::InBand ? "in-band" : "out-of-band") << "\n";
  out << "seed = " << seed << "\n";
  out << "lambda = " << lambda << "\n";
  out << "pet_failing_voters = " << join(pet_failing_voters) << "\n";
  return out.str();
}

int ElectionConfig::effective_code_bits() const {
  if (code_bits > 0) return code_bits;
  int l = 1;
  while (l < 62 && (std::uint64_t{1} << l) < code_space) ++l;
  return l;
}

void ElectionConfig::validate() const {
  if (election_id.empty() || election_id.find_first_of("/\t\n") != std::string::npos)
    throw InvalidArgument("config: election_id must be non-empty without '/' or whitespace");
  if (voters < 1) throw InvalidArgument("config: voters must be positive");
  if (options < 1) throw InvalidArgument("config: options must be positive");
  if (corrupt_voters < 0 || corrupt_voters > voters) throw InvalidArgument("config: need 0 <= corrupt_voters <= voters");
  if (code_space <= 2 * static_cast<std::uint64_t>(voters)) throw InvalidArgument("config: need code_space > 2 * voters");
  const int l = effective_code_bits();
  if (l < 1 || l > 62 || code_space > (std::uint64_t{1} << l)) throw InvalidArgument("config: need code_space <= 2^code_bits");
  if (tellers < 1 || threshold < 1 || threshold > tellers) throw InvalidArgument("config: need 1 <= threshold <= tellers");
  if (lambda < 1) throw InvalidArgument("config: lambda must be positive");
  for (int t : corrupt_tellers)
    if (t < 1 || t > tellers) throw InvalidArgument("config: corrupt teller index out of range");
  std::set<int> active(active_tellers.begin(), active_tellers.end());
  for (int t : active)
    if (t < 1 || t > tellers) throw InvalidArgument("config: active teller index out of range");
  if (tellers - static_cast<int>(active.size()) < threshold)
    throw InvalidArgument("config: fewer than threshold honest tellers");
  const auto ids = voter_ids();
  for (const auto& v : pet_failing_voters)
    if (std::find(ids.begin(), ids.end(), v) == ids.end()) throw InvalidArgument("config: unknown voter " + v);
  if (group.empty() && group_bits < 16) throw InvalidArgument("config: group_bits must be at least 16");
}

ParamsPtr ElectionConfig::make_params() const {
  if (group.empty()) return generate_params(group_bits, "rcv-group");
  if (group == "rfc3526-2048") return standard_group_2048();
  if (group == "rfc3526-3072") return standard_group_3072();
  return params_from_text(group);
}

std::vector<std::string> ElectionConfig::voter_ids() const {
  std::vector<std::string> ids;
  for (int v = 1; v <= voters; ++v) ids.push_back("voter-" + std::to_string(v));
  return ids;
}

// ---- election ---------------------------------------------------------------

Election::Election(ElectionConfig config, bool publish) : config_(std::move(config)), publish_(publish) {}

Rng Election::next_rng(const std::string& label) {
  return Rng(config_.election_id + "/" + config_.seed).fork(label + "#" + std::to_string(op_++));
}

void Election::publish(std::string_view kind, const std::string& payload) {
  if (publish_) board_.append(kind, payload);
}

Election Election::create(const ElectionConfig& config, bool publish) {
  config.validate();
  Election e(config, publish);
  const auto params = config.make_params();
  Rng rng = e.next_rng("setup");
  e.setup_ = setup_election(config.election_id, params, config.options, config.effective_code_bits(),
                            config.code_space, config.mode, config.tellers, config.threshold, rng);
  for (int t : config.active_tellers) e.tellers()[static_cast<std::size_t>(t - 1)].mode = TellerMode::Active;
  if (publish) {
    e.publish("params", params_payload(config, *params).dump());
    const auto& pub = e.setup_->pub;
    e.publish("key", json{{"election_key", ser::enc(pub.election_key)},
                          {"code_key", ser::enc(pub.code_key)},
                          {"election_dealings", dealings(e.setup_->election_dealings)},
                          {"code_dealings", dealings(e.setup_->code_dealings)},
                          {"aux_key", ser::enc(pub.aux_key)},
                          {"printing_key", ser::enc(pub.printing_key)}}
                         .dump());
  }
  return e;
}

void Election::register_voters(const CodegenHooks& hooks) {
  if (server_) throw ProtocolError("voters are already registered");
  const auto& pub = setup_->pub;
  CodegenSetup cs{pub.options, pub.codes, pub.codegen_keys(), config_.voter_ids(), {}, config_.lambda};
  for (const auto& t : tellers()) cs.tellers.push_back(t.index);

  std::set<int> active;
  for (const auto& t : tellers())
    if (t.mode == TellerMode::Active) active.insert(t.index);
  CodegenHooks run_hooks = hooks;
  if (!active.empty()) {
    run_hooks.tamper_shuffle = [active, hooks](ShuffleStep& s) {
      if (active.count(s.teller) && s.output.size() > 1) std::swap(s.output[0], s.output[1]);
      if (hooks.tamper_shuffle) hooks.tamper_shuffle(s);
    };
  }

  std::optional<CodegenResult> res;
  for (;;) {
    Rng rng = next_rng("codegen");
    res = generate_code_tables(cs, setup_->secrets.printing, rng, run_hooks);
    const auto reason = check_codegen(cs, res->transcript);
    if (!reason) break;
    const auto culprit = culprit_of(*reason);
    if (!culprit || cs.tellers.size() <= 1) throw ProofError("code generation failed: " + *reason, culprit.value_or(0));
    cs.tellers.erase(std::remove(cs.tellers.begin(), cs.tellers.end(), *culprit), cs.tellers.end());
  }

  for (const auto& s : res->transcript.shuffles) {
    auto j = ser::enc(s);
    j["type"] = "shuffle";
    publish("codegen-step", j.dump());
  }
  for (const auto& s : res->transcript.micro_mixes) {
    auto j = ser::enc(s);
    j["type"] = "micro-mix";
    publish("codegen-step", j.dump());
  }
  json rows = json::array();
  for (const auto& r : res->transcript.table) rows.push_back(ser::enc(r));
  publish("code-table", json{{"codegen_tellers", cs.tellers}, {"rows", rows}}.dump());

  sheets_ = res->sheets;
  table_ = res->transcript.table;
  for (const auto& s : sheets_) auth_[s.voter_id] = auth_digest(s.auth_code);
  server_.emplace(pub, table_, auth_);
}

const BallotSheet& Election::sheet(const std::string& voter_id) const {
  for (const auto& s : sheets_)
    if (s.voter_id == voter_id) return s;
  throw InvalidArgument("unknown voter " + voter_id);
}

const VotingServer& Election::server() const {
  if (!server_) throw ProtocolError("voters are not registered yet");
  return *server_;
}

CastOutcome Election::cast(const std::string& voter_id, const std::vector<bool>& choices, Platform platform,
                           int flip_option) {
  if (!server_) throw ProtocolError("voters are not registered yet");
  const auto& pub = setup_->pub;
  const auto& sh = sheet(voter_id);
  if (static_cast<int>(choices.size()) != config_.options) throw InvalidArgument("wrong number of choices");
  if (flip_option < 1 || flip_option > config_.options) throw InvalidArgument("flip option out of range");
  if (platform == Platform::Honest &&
      std::find(config_.pet_failing_voters.begin(), config_.pet_failing_voters.end(), voter_id) !=
          config_.pet_failing_voters.end())
    platform = Platform::FlipInconsistent;

  Rng rng = next_rng("cast/" + voter_id);
  auto altered = choices;
  altered[static_cast<std::size_t>(flip_option - 1)] = !altered[static_cast<std::size_t>(flip_option - 1)];
  Ballot ballot = [&] {
    switch (platform) {
      case Platform::FlipConsistent: return platform_build_ballot(pub, voter_id, altered, sh.flip_bits, rng);
      case Platform::FlipInconsistent:
        return build_ballot_raw(pub, voter_id, pub.options.encode_choice(altered), xor_bits(sh.flip_bits, choices), rng);
      case Platform::Honest: break;
    }
    return platform_build_ballot(pub, voter_id, choices, sh.flip_bits, rng);
  }();

  const CastSession& s = server_->submit(ballot, sh.auth_code, tellers(), rng);
  intents_[voter_id] = choices;
  publish("ballot", ser::enc(ballot).dump());
  publish("pet", json{{"voter", voter_id},
                      {"btilde", ser::enc(s.btilde)},
                      {"btilde_teller", s.btilde_teller},
                      {"e_star", ser::enc(*s.e_star)},
                      {"c_star", ser::enc(*s.c_star)},
                      {"pet", ser::enc(*s.pet)},
                      {"state", to_string(s.state)},
                      {"reason", s.reason}}
                     .dump());
  if (!s.code_shares.empty())
    publish("shares", json{{"voter", voter_id}, {"code_shares", ser::enc(s.code_shares)}}.dump());

  CastOutcome out;
  out.state = s.state;
  out.reason = s.reason;
  out.delivered_via = config_.delivery;
  if (s.state == SessionState::CodesSent) {
    out.codes = s.sent_codes;
    out.voter_accepts = voter_check_codes(sh, choices, out.codes);
  }
  return out;
}

FinalizeOutcome Election::finalize(const std::string& voter_id) {
  if (!server_) throw ProtocolError("voters are not registered yet");
  const auto& sh = sheet(voter_id);
  Rng rng = next_rng("finalize/" + voter_id);
  const std::uint64_t conf = server_->finalize(voter_id, sh.finalization_code, tellers(), rng);
  const auto* s = server_->session(voter_id);
  publish("finalization",
          json{{"voter", voter_id},
               {"finalization_code", sh.finalization_code},
               {"conf_shares", ser::enc(s->conf_shares)},
               {"confirmation", conf}}
              .dump());
  return FinalizeOutcome{conf, voter_check_confirmation(sh, conf)};
}

TallyResult Election::tally() {
  if (!server_) throw ProtocolError("voters are not registered yet");
  if (tally_) throw ProtocolError("the tally has already been computed");
  Rng rng = next_rng("tally");
  tally_ = rcv::tally(setup_->pub, server_->ballot_box(), tellers(), rng);
  publish("tally", ser::enc(*tally_).dump());
  return *tally_;
}

std::string Election::state_json() const {
  const auto& pub = setup_->pub;
  json tellers_j = json::array();
  for (const auto& t : setup_->secrets.tellers) tellers_j.push_back(ser::enc(t));
  json j{{"config", config_.to_text()},
         {"params", pub.params()->to_text()},
         {"op", op_},
         {"publish", publish_},
         {"tellers", tellers_j},
         {"printing", ser::enc(setup_->secrets.printing)},
         {"election_key", ser::enc(pub.election_key)},
         {"code_key", ser::enc(pub.code_key)},
         {"aux_key", ser::enc(pub.aux_key)},
         {"election_dealings", dealings(setup_->election_dealings)},
         {"code_dealings", dealings(setup_->code_dealings)}};
  if (server_) {
    json sheets = json::array();
    for (const auto& s : sheets_) sheets.push_back(ser::enc(s));
    json rows = json::array();
    for (const auto& r : table_) rows.push_back(ser::enc(r));
    json sessions = json::object();
    for (const auto& [id, s] : server_->sessions()) sessions[id] = ser::enc(s);
    json intents = json::object();
    for (const auto& [id, v] : intents_) intents[id] = ser::enc(v);
    j["sheets"] = sheets;
    j["auth"] = auth_;
    j["table"] = rows;
    j["sessions"] = sessions;
    j["box_order"] = server_->box_order();
    j["excluded"] = server_->excluded_tellers();
    j["intents"] = intents;
  }
  if (tally_) j["tally"] = ser::enc(*tally_);
  return j.dump();
}

Election Election::from_state(std::string_view state_json, Board board) {
  const json j = ser::parse(state_json);
  try {
    Election e(ElectionConfig::parse(j.at("config").get<std::string>()), j.at("publish").get<bool>());
    const auto params = params_from_text(j.at("params").get<std::string>());
    e.op_ = j.at("op").get<std::uint64_t>();
    const auto& c = e.config_;
    ElectionSecrets secrets{{}, ser::key_pair(j.at("printing"), params)};
    for (const auto& t : j.at("tellers")) secrets.tellers.push_back(ser::teller(t, params));
    ElectionPublic pub{c.election_id,
                       OptionEncoding(params, c.options),
                       CodeEncoding(params, c.options, c.effective_code_bits(), c.code_space, c.mode),
                       ser::threshold_key(j.at("election_key"), params),
                       ser::threshold_key(j.at("code_key"), params),
                       ser::cca2_public_key(j.at("aux_key"), params),
                       secrets.printing.pk};
    e.setup_ = SetupResult{std::move(pub), std::move(secrets), parse_dealings(j.at("election_dealings"), params),
                           parse_dealings(j.at("code_dealings"), params)};
    if (j.contains("sheets")) {
      for (const auto& s : j.at("sheets")) e.sheets_.push_back(ser::ballot_sheet(s));
      e.auth_ = j.at("auth").get<std::map<std::string, std::string>>();
      for (const auto& r : j.at("table")) e.table_.push_back(ser::table_row(r, params));
      std::map<std::string, CastSession> sessions;
      for (const auto& [id, s] : j.at("sessions").items()) sessions.emplace(id, ser::cast_session(s, params));
      for (const auto& [id, v] : j.at("intents").items()) e.intents_[id] = ser::bits(v);
      e.server_.emplace(e.setup_->pub, e.table_, e.auth_);
      e.server_->restore(std::move(sessions), j.at("box_order").get<std::vector<std::string>>(),
                         j.at("excluded").get<std::set<int>>());
    }
    if (j.contains("tally")) e.tally_ = ser::tally_result(j.at("tally"), params);
    e.board_ = std::move(board);
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("state file: ") + ex.what());
  } catch (const InvalidArgument& ex) {
    throw FormatError(std::string("state file: ") + ex.what());
  }
}

void Election::save(const std::string& dir) const {
  std::filesystem::create_directories(dir);
  write_file(dir + "/state.json", state_json());
  board_.save(dir + "/board.txt");
  std::string sheets;
  for (const auto& s : sheets_) sheets += sheet_to_text(s) + "\n";
  write_file(dir + "/sheets.txt", sheets);
}

Election Election::load(const std::string& dir) {
  return from_state(read_file(dir + "/state.json"), Board::load(dir + "/board.txt"));
}

// ---- board replay -----------------------------------------------------------

std::optional<std::string> verify_board(const Board& board) {
  if (!board.verify_chain()) return "hash chain broken";
  const auto& entries = board.entries();
  if (entries.size() < 2 || entries[0].kind != "params" || entries[1].kind != "key")
    return "board must start with params and key entries";
  try {
    const json pj = ser::parse(entries[0].payload);
    const auto params = params_from_text(pj.at("params").get<std::string>());
    const int k = pj.at("options").get<int>();
    const int n_tellers = pj.at("tellers").get<int>();
    const int threshold = pj.at("threshold").get<int>();
    const auto voter_ids = pj.at("voters").get<std::vector<std::string>>();
    const std::string election_id = pj.at("election_id").get<std::string>();

    const json kj = ser::parse(entries[1].payload);
    const auto election_key = ser::threshold_key(kj.at("election_key"), params);
    const auto code_key = ser::threshold_key(kj.at("code_key"), params);
    for (const auto& [key, field] : {std::pair{&election_key, "election_dealings"}, std::pair{&code_key, "code_dealings"}}) {
      const auto d = parse_dealings(kj.at(field), params);
      if (static_cast<int>(d.size()) != n_tellers) return std::string("wrong number of dealings in ") + field;
      for (const auto& v : d)
        if (static_cast<int>(v.size()) != threshold) return std::string("malformed dealing in ") + field;
      const auto agg = aggregate_commitments(d, threshold, n_tellers);
      if (agg.pk != key->pk || agg.commitments != key->commitments || key->threshold != threshold ||
          key->tellers != n_tellers)
        return std::string("public key does not match the published dealings: ") + field;
    }
    ElectionPublic pub{election_id,
                       OptionEncoding(params, k),
                       CodeEncoding(params, k, pj.at("code_bits").get<int>(), pj.at("code_space").get<std::uint64_t>(),
                                    code_mode_from_string(pj.at("mode").get<std::string>())),
                       election_key,
                       code_key,
                       ser::cca2_public_key(kj.at("aux_key"), params),
                       ser::element(kj.at("printing_key"), params)};

    std::size_t i = 2;
    CodegenTranscript tr;
    for (; i < entries.size() && entries[i].kind == "codegen-step"; ++i) {
      const json sj = ser::parse(entries[i].payload);
      const std::string type = sj.at("type").get<std::string>();
      if (type == "shuffle") {
        if (!tr.micro_mixes.empty()) return "shuffle step after a micro-mix step";
        tr.shuffles.push_back(ser::shuffle_step(sj, params));
      } else if (type == "micro-mix") {
        tr.micro_mixes.push_back(ser::micro_mix_step(sj, params));
      } else {
        return "unknown codegen step type";
      }
    }
    if (i == entries.size()) return std::nullopt;  // keys only, nobody registered yet
    if (entries[i].kind != "code-table") return "expected the code table after the codegen steps";
    const json tj = ser::parse(entries[i].payload);
    ++i;
    for (const auto& r : tj.at("rows")) tr.table.push_back(ser::table_row(r, params));
    CodegenSetup cs{pub.options, pub.codes, pub.codegen_keys(), voter_ids,
                    tj.at("codegen_tellers").get<std::vector<int>>(), pj.at("lambda").get<int>()};
    for (int t : cs.tellers)
      if (t < 1 || t > n_tellers) return "codegen teller out of range";
    if (cs.tellers.empty()) return "no codegen tellers";
    if (const auto why = check_codegen(cs, tr)) return "code generation: " + *why;
    std::map<std::string, const CodeTableRow*> rows;
    for (const auto& r : tr.table) rows[r.voter_id] = &r;

    std::map<std::string, CastSession> sessions;
    std::vector<std::string> box_order;
    std::set<std::string> pet_seen;
    bool tallied = false;
    for (; i < entries.size(); ++i) {
      const auto& e = entries[i];
      if (tallied) return "entries after the tally";
      const json j = ser::parse(e.payload);
      if (e.kind == "ballot") {
        auto b = ser::ballot(j, params);
        if (!rows.count(b.voter_id)) return "ballot from unknown voter " + b.voter_id;
        if (sessions.count(b.voter_id)) return "second ballot from " + b.voter_id;
        const std::string id = b.voter_id;
        sessions.emplace(id, CastSession{id, SessionState::Submitted, std::move(b), {}, 0, {}, {}, {}, {}, {}, {}, {}, {}});
        continue;
      }
      if (e.kind == "tally") {
        std::vector<Ballot> box;
        for (const auto& id : box_order) box.push_back(sessions.at(id).ballot);
        if (const auto why = check_tally(pub, box, ser::tally_result(j, params))) return "tally: " + *why;
        tallied = true;
        continue;
      }
      if (e.kind != "pet" && e.kind != "shares" && e.kind != "finalization") return "unexpected entry kind " + e.kind;
      const std::string id = j.at("voter").get<std::string>();
      const auto it = sessions.find(id);
      if (it == sessions.end()) return e.kind + " entry without a ballot for " + id;
      CastSession& s = it->second;
      if (e.kind == "pet") {
        if (pet_seen.count(id)) return "second PET for " + id;
        pet_seen.insert(id);
        s.btilde = ser::bits(j.at("btilde"));
        s.btilde_teller = j.at("btilde_teller").get<int>();
        s.e_star = ser::ciphertext(j.at("e_star"), params);
        s.c_star = ser::ciphertext(j.at("c_star"), params);
        s.pet = ser::pet_transcript(j.at("pet"), params);
        const std::string state = j.at("state").get<std::string>();
        if (state == "cancelled") s.state = SessionState::Cancelled;
        else if (state == "codes-sent") s.state = SessionState::PetChecked;
        else return "unexpected session state " + state;
        s.reason = j.at("reason").get<std::string>();
      } else if (e.kind == "shares") {
        if (!s.pet || !s.code_shares.empty()) return "code shares out of order for " + id;
        s.code_shares = ser::decryption_shares(j.at("code_shares"), params);
        if (s.state == SessionState::PetChecked) s.state = SessionState::CodesSent;
      } else {
        if (s.state != SessionState::CodesSent) return "finalization without released codes for " + id;
        if (!open_finalization(id, j.at("finalization_code").get<std::string>(), rows.at(id)->fin_commitment))
          return "finalization code does not open the commitment for " + id;
        s.conf_shares = ser::decryption_shares(j.at("conf_shares"), params);
        s.confirmation = j.at("confirmation").get<std::uint64_t>();
        s.state = SessionState::Finalized;
        box_order.push_back(id);
      }
    }
    for (const auto& [id, s] : sessions) {
      if (!s.pet) return "ballot without a PET transcript for " + id;
      if (s.state == SessionState::PetChecked) return "PET passed but no code shares for " + id;
      if (const auto why = check_session(pub, *rows.at(id), s)) return "session " + id + ": " + *why;
    }
  } catch (const Error& ex) {
    return std::string("malformed entry: ") + ex.what();
  } catch (const nlohmann::json::exception& ex) {
    return std::string("malformed entry: ") + ex.what();
  }
  return std::nullopt;
}

std::optional<std::string> verify_board_file(const std::string& path) {
  try {
    return verify_board(Board::load(path));
  } catch (const FormatError& e) {
    return std::string("unreadable board: ") + e.what();
  }
}

// ---- runs and experiments ---------------------------------------------------

RunReport run_election(const ElectionConfig& config, Election* out) {
  Election e = Election::create(config);
  e.register_voters();
  Rng choices_rng = Rng(config.seed).fork("choices");
  RunReport rep;
  rep.expected_counts.assign(static_cast<std::size_t>(config.options), 0);
  for (const auto& id : config.voter_ids()) {
    const auto v = random_choices(choices_rng, config.options);
    const auto cast = e.cast(id, v);
    const bool cheated = std::find(config.pet_failing_voters.begin(), config.pet_failing_voters.end(), id) !=
                         config.pet_failing_voters.end();
    if (cast.state == SessionState::Cancelled) {
      ++rep.cancelled;
      if (!cheated) rep.all_honest_accepted = false;
      continue;
    }
    if (!cast.voter_accepts) {
      ++rep.rejected_by_voter;
      if (!cheated) rep.all_honest_accepted = false;
      continue;
    }
    if (!e.finalize(id).voter_accepts) rep.all_honest_accepted = false;
    ++rep.finalized;
    for (std::size_t i = 0; i < v.size(); ++i) rep.expected_counts[i] += v[i];
  }
  rep.counts = e.tally().counts;
  rep.board_verified = !verify_board(e.board()).has_value();
  if (out) *out = std::move(e);
  return rep;
}

double cai_bound(std::uint64_t m, int n, int n_corrupt) {
  const long long pool = static_cast<long long>(m) - n - n_corrupt;
  if (pool < 1) throw InvalidArgument("m - n - n' must be positive");
  return 1.0 / static_cast<double>(pool);
}

namespace {

void check_v1(const ElectionConfig& config) {
  std::set<int> corrupt(config.corrupt_tellers.begin(), config.corrupt_tellers.end());
  corrupt.insert(config.active_tellers.begin(), config.active_tellers.end());
  if (static_cast<int>(corrupt.size()) > config.threshold - 1)
    throw InvalidArgument("experiment requires at most t-1 corrupted tellers");
}

}  // namespace

std::string ExperimentReport::to_json() const {
  return json{{"experiment", name},      {"trials", trials}, {"successes", successes},
              {"rate", rate},            {"bound", bound},   {"slack", slack},
              {"pass", pass},            {"seconds", seconds}}
      .dump();
}

ExperimentReport experiment_cai(const ElectionConfig& config, std::uint64_t trials) {
  config.validate();
  check_v1(config);
  if (config.corrupt_voters >= config.voters) throw InvalidArgument("experiment needs an honest voter");
  if (trials == 0) throw InvalidArgument("trials must be positive");
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentReport rep;
  rep.name = "cai";
  rep.trials = trials;
  rep.bound = cai_bound(config.code_space, config.voters, config.corrupt_voters);
  const auto ids = config.voter_ids();
  const std::string target = ids[static_cast<std::size_t>(config.corrupt_voters)];

  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    ElectionConfig c = config;
    c.seed = config.seed + "/cai/" + std::to_string(trial);
    Election e = Election::create(c, false);
    e.register_voters();
    Rng adv = Rng(c.seed).fork("adversary");

    std::set<std::uint64_t> seen;
    std::vector<bool> intended;
    for (const auto& id : ids) {
      const auto v = random_choices(adv, c.options);
      const bool is_target = id == target;
      const auto out = e.cast(id, v, is_target ? Platform::FlipConsistent : Platform::Honest, 1);
      if (out.state != SessionState::CodesSent) throw ProtocolError("experiment cast did not reach CodesSent");
      seen.insert(out.codes[0]);
      if (is_target) intended = v;
    }
    for (int cv = 0; cv < c.corrupt_voters; ++cv) {
      const auto& sh = e.sheet(ids[static_cast<std::size_t>(cv)]);
      seen.insert(sh.return_codes[0][0]);
      seen.insert(sh.return_codes[0][1]);
    }
    std::vector<std::uint64_t> pool;
    for (std::uint64_t code = 1; code <= c.code_space; ++code)
      if (!seen.count(code)) pool.push_back(code);
    const std::uint64_t guess = pool[adv.below(static_cast<std::uint64_t>(pool.size()))];
    const std::uint64_t expected = e.sheet(target).return_codes[0][intended[0] ? 1 : 0];
    if (guess == expected) ++rep.successes;
  }
  rep.rate = static_cast<double>(rep.successes) / static_cast<double>(trials);
  rep.slack = 2.576 * std::sqrt(rep.bound * (1 - rep.bound) / static_cast<double>(trials));
  rep.pass = rep.rate <= rep.bound + rep.slack;
  rep.seconds = elapsed(t0);
  return rep;
}

std::string PrivacyReport::to_json() const {
  json ds = json::array();
  for (const auto& d : distinguishers) {
    ds.push_back(json{{"name", d.name},
                      {"violates_assumptions", d.violates_assumptions},
                      {"ones_p0", d.ones_p0},
                      {"ones_p1", d.ones_p1},
                      {"advantage", d.advantage},
                      {"sigma", d.sigma},
                      {"pass", d.pass}});
  }
  return json{{"experiment", "privacy"}, {"trials", trials}, {"distinguishers", ds}, {"pass", pass}, {"seconds", seconds}}
      .dump();
}

PrivacyReport experiment_privacy(const ElectionConfig& config, std::uint64_t trials) {
  config.validate();
  check_v1(config);
  if (config.voters < 2) throw InvalidArgument("privacy experiment needs two honest voters");
  if (config.corrupt_voters > config.voters - 2) throw InvalidArgument("privacy experiment needs two honest voters");
  if (trials == 0) throw InvalidArgument("trials must be positive");
  const auto t0 = std::chrono::steady_clock::now();
  const auto ids = config.voter_ids();
  // Honest voters A and B are the last two; corrupted voters come first.
  const std::string voter_a = ids[ids.size() - 2];
  const std::string voter_b = ids[ids.size() - 1];
  std::vector<bool> x(static_cast<std::size_t>(config.options), false);
  x[0] = true;
  const std::vector<bool> y(static_cast<std::size_t>(config.options), false);

  struct Counter {
    std::string name;
    bool violates;
    std::uint64_t ones[2] = {0, 0};
    // Paired differences out(P0) - out(P1); both worlds share a seed.
    std::int64_t diff_sq = 0;
  };
  std::vector<Counter> counters{{"board", false}, {"returned-codes", false}, {"pet", false},
                                {"sheets", true},  {"t-shares", true}};

  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    std::vector<bool> outs[2];
    for (int world = 0; world < 2; ++world) {
      ElectionConfig c = config;
      c.seed = config.seed + "/privacy/" + std::to_string(trial);
      Election e = Election::create(c);
      e.register_voters();
      Rng others = Rng(c.seed).fork("others");
      std::vector<std::uint64_t> codes_a;
      for (const auto& id : ids) {
        std::vector<bool> v;
        if (id == voter_a) v = world == 0 ? x : y;
        else if (id == voter_b) v = world == 0 ? y : x;
        else v = random_choices(others, c.options);
        const auto out = e.cast(id, v);
        if (out.voter_accepts) e.finalize(id);
        if (id == voter_a) codes_a = out.codes;
      }
      const auto& board = e.board();

      std::vector<bool> out_bits(counters.size(), false);
      out_bits[0] = sha256(board.serialize())[0] & 1;
      out_bits[1] = !codes_a.empty() && (codes_a[0] & 1);
      std::optional<Ballot> ballot_a;
      for (const auto* entry : board.read_all("pet")) {
        const auto j = ser::parse(entry->payload);
        if (j.at("voter") == voter_a) out_bits[2] = ser::bits(j.at("btilde"))[0];
      }
      for (const auto* entry : board.read_all("ballot")) {
        const auto j = ser::parse(entry->payload);
        if (j.at("voter") == voter_a) ballot_a = ser::ballot(j, e.pub().params());
      }
      // With the sheet, the published btilde reveals the choice.
      out_bits[3] = out_bits[2] != e.sheet(voter_a).flip_bits[0];
      // With t key shares, the ballot decrypts.
      std::vector<TellerKeyShare> shares;
      for (int t = 0; t < c.threshold; ++t) shares.push_back(e.tellers()[static_cast<std::size_t>(t)].election_share);
      out_bits[4] = ballot_a && decrypt(reconstruct_secret(shares), ballot_a->w) == e.pub().options.gamma(1);

      for (std::size_t d = 0; d < counters.size(); ++d) counters[d].ones[world] += out_bits[d];
      outs[world] = out_bits;
    }
    for (std::size_t d = 0; d < counters.size(); ++d) counters[d].diff_sq += outs[0][d] != outs[1][d];
  }

  PrivacyReport rep;
  rep.trials = trials;
  rep.pass = true;
  const double n = static_cast<double>(trials);
  for (const auto& c : counters) {
    DistinguisherResult d;
    d.name = c.name;
    d.violates_assumptions = c.violates;
    d.ones_p0 = c.ones[0];
    d.ones_p1 = c.ones[1];
    const double p0 = static_cast<double>(c.ones[0]) / n;
    const double p1 = static_cast<double>(c.ones[1]) / n;
    d.advantage = std::fabs(p0 - p1);
    // Standard error of the mean paired difference.
    const double mean_d = p0 - p1;
    const double var_d = static_cast<double>(c.diff_sq) / n - mean_d * mean_d;
    d.sigma = std::sqrt(std::max(var_d, 0.0) / n);
    d.pass = c.violates ? d.advantage > 0.9 : d.advantage <= 2 * d.sigma;
    rep.pass = rep.pass && d.pass;
    rep.distinguishers.push_back(d);
  }
  rep.seconds = elapsed(t0);
  return rep;
}

}  // namespace rcv
