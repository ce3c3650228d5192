#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rcv {

/// Entry kinds accepted on the board.
bool is_board_kind(std::string_view kind);

struct BoardEntry {
  std::uint64_t seq = 0;
  std::string kind;
  std::string prev_hash;
  std::string entry_hash;
  std::string payload;
};

/// entry_hash = hex(SHA-256(seq "\n" kind "\n" payload "\n" prev_hash)).
std::string board_entry_hash(std::uint64_t seq, std::string_view kind, std::string_view payload,
                             std::string_view prev_hash);

/// Append-only, hash-chained bulletin board. One entry per line; see
/// docs/board-format.md.
class Board {
 public:
  /// Throws InvalidArgument on an unknown kind or a payload containing a
  /// tab or newline.
  const BoardEntry& append(std::string_view kind, std::string payload);

  const std::vector<BoardEntry>& entries() const { return entries_; }
  std::vector<const BoardEntry*> read_all(std::optional<std::string_view> kind = std::nullopt) const;
  std::string tail_hash() const;

  bool verify_chain() const;

  std::string serialize() const;
  /// Strict parser; throws FormatError on any deviation from the format.
  /// The chain itself is not checked here.
  static Board parse(std::string_view text);
  static Board load(const std::string& path);
  void save(const std::string& path) const;

 private:
  std::vector<BoardEntry> entries_;
};

/// Parses and checks the chain; false on any parse error.
bool verify_board_text(std::string_view text);

}  // namespace rcv
