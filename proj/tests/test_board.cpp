#include "doctest.h"
#include "rcv/board.hpp"
#include "rcv/error.hpp"
#include "rcv/hash.hpp"
#include "rcv/rng.hpp"

using namespace rcv;

namespace {

Board sample() {
  Board b;
  b.append("params", R"({"p":"23"})");
  b.append("key", R"({"pk":"18"})");
  b.append("ballot", R"({"voter":"voter-1","w":{"a":"4","b":"18"}})");
  b.append("tally", R"({"counts":[1]})");
  return b;
}

}  // namespace

TEST_CASE("append chains entries") {
  Board b;
  const auto& first = b.append("params", "{}");
  CHECK(first.seq == 0);
  CHECK(first.prev_hash == std::string(64, '0'));
  CHECK(first.entry_hash == to_hex(sha256("0\nparams\n{}\n" + std::string(64, '0'))));
  const auto first_hash = first.entry_hash;
  const auto& second = b.append("key", "{\"x\":1}");
  CHECK(second.seq == 1);
  CHECK(second.prev_hash == first_hash);
  CHECK(b.verify_chain());
  CHECK(b.read_all("key").size() == 1);
  CHECK(b.read_all().size() == 2);
  CHECK(b.read_all("tally").empty());
}

TEST_CASE("append rejects bad input") {
  Board b;
  CHECK_THROWS_AS(b.append("gossip", "{}"), InvalidArgument);
  CHECK_THROWS_AS(b.append("key", "a\tb"), InvalidArgument);
  CHECK_THROWS_AS(b.append("key", "a\nb"), InvalidArgument);
}

TEST_CASE("serialize and parse") {
  const Board b = sample();
  const auto text = b.serialize();
  CHECK(text.substr(0, 9) == "0\tparams\t");
  const Board back = Board::parse(text);
  CHECK(back.serialize() == text);
  CHECK(back.verify_chain());
  CHECK(verify_board_text(text));
  CHECK(verify_board_text(""));
  CHECK_THROWS_AS(Board::parse(text.substr(0, text.size() - 1)), FormatError);
  CHECK_THROWS_AS(Board::parse("x\tparams\t" + std::string(64, '0') + "\t" + std::string(64, '0') + "\t{}\n"),
                  FormatError);
}

TEST_CASE("tampering is detected") {
  const auto text = sample().serialize();
  SUBCASE("payload") {
    auto t = text;
    t[t.find("voter-1")] = 'V';
    CHECK_FALSE(verify_board_text(t));
  }
  SUBCASE("reordered entries") {
    const auto first_end = text.find('\n') + 1;
    const auto second_end = text.find('\n', first_end) + 1;
    const auto t = text.substr(first_end, second_end - first_end) + text.substr(0, first_end) + text.substr(second_end);
    CHECK_FALSE(verify_board_text(t));
  }
  SUBCASE("dropped entry") {
    const auto first_end = text.find('\n') + 1;
    CHECK_FALSE(verify_board_text(text.substr(first_end)));
  }
  SUBCASE("recomputed hash without fixing the chain") {
    auto t = text;
    const auto pos = t.find(R"({"pk":"18"})");
    t.replace(pos, 11, R"({"pk":"16"})");
    CHECK_FALSE(verify_board_text(t));
  }
}

TEST_CASE("every single-byte mutation is detected") {
  const auto text = sample().serialize();
  Rng rng("board-mutations");
  int detected = 0;
  for (int i = 0; i < 1000; ++i) {
    auto t = text;
    const auto pos = rng.below(static_cast<std::uint64_t>(t.size()));
    char c;
    do {
      c = static_cast<char>(rng.below(std::uint64_t{256}));
    } while (c == t[pos]);
    t[pos] = c;
    if (!verify_board_text(t)) ++detected;
  }
  CHECK(detected == 1000);
}
