#include "rcv/board.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include "rcv/error.hpp"
#include "rcv/hash.hpp"

namespace rcv {

namespace {

constexpr std::array<std::string_view, 9> kKinds{"params", "key",    "codegen-step",  "code-table", "ballot",
                                                 "pet",    "shares", "finalization", "tally"};
const std::string kZeroHash(64, '0');

bool is_hex64(std::string_view s) {
  if (s.size() != 64) return false;
  for (char c : s)
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  return true;
}

std::uint64_t parse_seq(std::string_view s) {
  if (s.empty() || s.size() > 19 || (s.size() > 1 && s[0] == '0')) throw FormatError("bad sequence number");
  std::uint64_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') throw FormatError("bad sequence number");
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

}  // namespace

bool is_board_kind(std::string_view kind) {
  for (auto k : kKinds)
    if (k == kind) return true;
  return false;
}

std::string board_entry_hash(std::uint64_t seq, std::string_view kind, std::string_view payload,
                             std::string_view prev_hash) {
  std::string buf = std::to_string(seq);
  buf += '\n';
  buf += kind;
  buf += '\n';
  buf += payload;
  buf += '\n';
  buf += prev_hash;
  return to_hex(sha256(buf));
}

const BoardEntry& Board::append(std::string_view kind, std::string payload) {
  if (!is_board_kind(kind)) throw InvalidArgument("unknown board entry kind");
  if (payload.find_first_of("\t\n\r") != std::string::npos) throw InvalidArgument("payload contains a separator");
  BoardEntry e;
  e.seq = entries_.size();
  e.kind = std::string(kind);
  e.prev_hash = tail_hash();
  e.payload = std::move(payload);
  e.entry_hash = board_entry_hash(e.seq, e.kind, e.payload, e.prev_hash);
  entries_.push_back(std::move(e));
  return entries_.back();
}

std::vector<const BoardEntry*> Board::read_all(std::optional<std::string_view> kind) const {
  std::vector<const BoardEntry*> out;
  for (const auto& e : entries_)
    if (!kind || e.kind == *kind) out.push_back(&e);
  return out;
}

std::string Board::tail_hash() const { return entries_.empty() ? kZeroHash : entries_.back().entry_hash; }

bool Board::verify_chain() const {
  std::string prev = kZeroHash;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.seq != i || !is_board_kind(e.kind) || e.prev_hash != prev) return false;
    if (e.payload.find_first_of("\t\n\r") != std::string::npos) return false;
    if (board_entry_hash(e.seq, e.kind, e.payload, e.prev_hash) != e.entry_hash) return false;
    prev = e.entry_hash;
  }
  return true;
}

std::string Board::serialize() const {
  std::string out;
  for (const auto& e : entries_) {
    out += std::to_string(e.seq);
    out += '\t';
    out += e.kind;
    out += '\t';
    out += e.prev_hash;
    out += '\t';
    out += e.entry_hash;
    out += '\t';
    out += e.payload;
    out += '\n';
  }
  return out;
}

Board Board::parse(std::string_view text) {
  Board b;
  if (!text.empty() && text.back() != '\n') throw FormatError("board must end with a newline");
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    std::array<std::string_view, 5> fields;
    for (std::size_t f = 0; f < 4; ++f) {
      const std::size_t tab = line.find('\t');
      if (tab == std::string_view::npos) throw FormatError("board line has too few fields");
      fields[f] = line.substr(0, tab);
      line.remove_prefix(tab + 1);
    }
    fields[4] = line;
    if (fields[4].find_first_of("\t\r") != std::string_view::npos) throw FormatError("stray separator in payload");
    BoardEntry e;
    e.seq = parse_seq(fields[0]);
    if (!is_board_kind(fields[1])) throw FormatError("unknown entry kind");
    if (!is_hex64(fields[2]) || !is_hex64(fields[3])) throw FormatError("malformed hash");
    e.kind = std::string(fields[1]);
    e.prev_hash = std::string(fields[2]);
    e.entry_hash = std::string(fields[3]);
    e.payload = std::string(fields[4]);
    b.entries_.push_back(std::move(e));
  }
  return b;
}

Board Board::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open board file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void Board::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write board file " + path);
  out << serialize();
  if (!out) throw Error("write failed for " + path);
}

bool verify_board_text(std::string_view text) {
  try {
    return Board::parse(text).verify_chain();
  } catch (const FormatError&) {
    return false;
  }
}

}  // namespace rcv
