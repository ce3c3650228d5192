#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "rcv/codegen.hpp"
#include "rcv/error.hpp"

using namespace rcv;
using rcv::test::scal;

namespace {

struct Fixture {
  ParamsPtr params;
  Rng rng;
  KeyPair e, c, p;
  CodegenSetup setup;

  Fixture(int voters, int k, int l, std::uint64_t m, int tellers, int lambda, const std::string& seed,
          ParamsPtr group = test::group64())
      : params(group),
        rng(seed),
        e(keygen(params, rng)),
        c(keygen(params, rng)),
        p(keygen(params, rng)),
        setup{OptionEncoding(params, k), CodeEncoding(params, k, l, m, CodeMode::Sparse),
              CodegenKeys{e.pk, c.pk, p.pk}, {}, {}, lambda} {
    for (int v = 0; v < voters; ++v) setup.voter_ids.push_back("voter-" + std::to_string(v + 1));
    for (int t = 1; t <= tellers; ++t) setup.tellers.push_back(t);
  }

  const CodegenKeys& keys() const { return setup.keys; }

  std::uint64_t print_code(const Ciphertext& ct) const { return extract_integer(decrypt(p.sk, ct)).get_ui(); }
  std::uint64_t code_of(const Ciphertext& ct, int option) const {
    const auto codes = setup.codes.decode_codes(decrypt(c.sk, ct));
    for (int j = 1; j <= setup.codes.options(); ++j)
      if (j != option) REQUIRE(codes[static_cast<std::size_t>(j - 1)] == 1);
    return codes[static_cast<std::size_t>(option - 1)];
  }
};

std::multiset<std::pair<std::string, std::string>> plaintexts(const Fixture& f, const std::vector<CodePair>& list) {
  std::multiset<std::pair<std::string, std::string>> out;
  for (const auto& pr : list) out.emplace(decrypt(f.c.sk, pr.code).str(), decrypt(f.p.sk, pr.print).str());
  return out;
}

}  // namespace

TEST_CASE("deterministic code lists") {
  Fixture f(2, 2, 3, 8, 1, 4, "lists");
  const auto list = generate_code_lists(f.setup.codes, 1, f.keys());
  REQUIRE(list.size() == 8);
  CHECK(list[0].code == encrypt(f.c.pk, GroupElement::identity(f.params), scal(f.params, 1)));
  CHECK(list[0].print == encrypt(f.p.pk, print_plaintext(f.params, 1), scal(f.params, 1)));
  CHECK(generate_code_lists(f.setup.codes, 1, f.keys()) == list);
  CHECK(generate_code_lists(f.setup.codes, 2, f.keys()) != list);

  std::set<std::pair<std::string, std::string>> seen;
  for (std::uint64_t code = 1; code <= 8; ++code) {
    const auto& pr = list[code - 1];
    CHECK(decrypt(f.c.sk, pr.code) == f.setup.codes.delta(1, code));
    CHECK(f.print_code(pr.print) == code);
    seen.emplace(decrypt(f.c.sk, pr.code).str(), decrypt(f.p.sk, pr.print).str());
  }
  CHECK(seen.size() == 8);
}

TEST_CASE("paired shuffle") {
  Fixture f(2, 1, 3, 8, 1, 16, "shuffle");
  const auto input = generate_code_lists(f.setup.codes, 1, f.keys());
  const auto res = paired_shuffle(f.keys(), input, 16, "ctx", f.rng);

  CHECK(verify_shuffle(f.keys(), input, res.output, res.proof, 16, "ctx"));
  CHECK(plaintexts(f, res.output) == plaintexts(f, input));
  // Same permutation on both components: each output pair still decrypts to (delta(c), c).
  for (const auto& pr : res.output) CHECK(decrypt(f.c.sk, pr.code) == f.setup.codes.delta(1, f.print_code(pr.print)));

  SUBCASE("identity mix with zero randomness leaves the input unchanged") {
    ShuffleOpening id;
    for (std::size_t i = 0; i < input.size(); ++i) {
      id.permutation.push_back(i);
      id.code_r.push_back(Scalar::zero(f.params));
      id.print_r.push_back(Scalar::zero(f.params));
    }
    const auto same = paired_shuffle(f.keys(), input, id, 16, "ctx", f.rng);
    CHECK(same.output == input);
    CHECK(verify_shuffle(f.keys(), input, same.output, same.proof, 16, "ctx"));
  }

  SUBCASE("tampering is caught") {
    auto out = res.output;
    out[3].code.b = out[3].code.b * GroupElement::generator(f.params);
    CHECK_FALSE(verify_shuffle(f.keys(), input, out, res.proof, 16, "ctx"));
    out = res.output;
    std::swap(out[0].print, out[1].print);
    CHECK_FALSE(verify_shuffle(f.keys(), input, out, res.proof, 16, "ctx"));
    auto proof = res.proof;
    proof.openings[5].code_r[0] = proof.openings[5].code_r[0] + scal(f.params, 1);
    CHECK_FALSE(verify_shuffle(f.keys(), input, res.output, proof, 16, "ctx"));
    proof = res.proof;
    proof.shadows.pop_back();
    proof.openings.pop_back();
    CHECK_FALSE(verify_shuffle(f.keys(), input, res.output, proof, 16, "ctx"));
    CHECK_FALSE(verify_shuffle(f.keys(), input, res.output, res.proof, 16, "other"));
  }

  SUBCASE("a mix that drops a code cannot be proven") {
    // Replace code 8 by a second copy of code 1 and try to prove it.
    auto cheat = res.output;
    for (auto& pr : cheat)
      if (f.print_code(pr.print) == 8)
        pr = CodePair{reencrypt(f.c.pk, input[0].code, scal(f.params, 5)),
                      reencrypt(f.p.pk, input[0].print, scal(f.params, 5))};
    int accepted = 0;
    for (int trial = 0; trial < 20; ++trial) {
      Rng r("cheat-" + std::to_string(trial));
      const auto proof = paired_shuffle(f.keys(), input, 4, "ctx", r).proof;
      if (verify_shuffle(f.keys(), input, cheat, proof, 4, "ctx")) ++accepted;
    }
    CHECK(accepted == 0);
  }
}

TEST_CASE("record assembly") {
  Fixture f(3, 2, 3, 8, 1, 4, "assemble");
  std::vector<std::vector<CodePair>> lists;
  for (int j = 1; j <= 2; ++j)
    lists.push_back(paired_shuffle(f.keys(), generate_code_lists(f.setup.codes, j, f.keys()), 2, "x", f.rng).output);
  const auto records = assemble_records(lists, f.setup.options, f.keys(), 3);
  REQUIRE(records.size() == 6);
  for (std::size_t r = 0; r < records.size(); ++r) {
    const int j = static_cast<int>(r % 2) + 1;
    const auto& rec = records[r];
    REQUIRE(rec.size() == kRecordSlots);
    CHECK(f.print_code(rec[0]) == 1);
    CHECK(f.print_code(rec[2]) == 2);
    CHECK(decrypt(f.e.sk, rec[4]).is_identity());
    CHECK(decrypt(f.e.sk, rec[6]) == f.setup.options.gamma(j));
    CHECK(rec[4] == encrypt_deterministic(f.e.pk, GroupElement::identity(f.params)));
    CHECK(f.code_of(rec[5], j) == f.print_code(rec[1]));
    CHECK(f.code_of(rec[7], j) == f.print_code(rec[3]));
  }
  CHECK_THROWS_AS(assemble_records(lists, f.setup.options, f.keys(), 5), InvalidArgument);
}

TEST_CASE("micro-mix") {
  Fixture f(1, 1, 3, 8, 1, 4, "micro");
  const std::vector<std::vector<CodePair>> lists{generate_code_lists(f.setup.codes, 1, f.keys())};
  const auto rec = assemble_records(lists, f.setup.options, f.keys(), 1)[0];
  const auto plain = [&](const Record& r) {
    std::vector<std::string> out;
    for (std::size_t s = 0; s < kRecordSlots; ++s) {
      const auto& key = slot_key(f.keys(), s);
      const auto& sk = key == f.p.pk ? f.p.sk : key == f.e.pk ? f.e.sk : f.c.sk;
      out.push_back(decrypt(sk, r[s]).str());
    }
    return out;
  };
  const auto before = plain(rec);

  const auto keep = micro_mix(f.keys(), rec, false, "m", f.rng);
  CHECK(plain(keep.output) == before);
  CHECK(keep.output != rec);
  CHECK(verify_micro_mix(f.keys(), rec, keep.output, keep.proof, "m"));

  const auto flip = micro_mix(f.keys(), rec, true, "m", f.rng);
  const auto after = plain(flip.output);
  const std::array<std::size_t, 8> swap{2, 3, 0, 1, 6, 7, 4, 5};
  for (std::size_t s = 0; s < kRecordSlots; ++s) CHECK(after[s] == before[swap[s]]);
  CHECK(verify_micro_mix(f.keys(), rec, flip.output, flip.proof, "m"));

  CHECK_FALSE(verify_micro_mix(f.keys(), rec, flip.output, flip.proof, "other"));
  CHECK_FALSE(verify_micro_mix(f.keys(), rec, keep.output, flip.proof, "m"));
  for (std::size_t s = 0; s < kRecordSlots; ++s) {
    auto bad = flip.output;
    bad[s].b = bad[s].b * GroupElement::generator(f.params);
    CHECK_FALSE(verify_micro_mix(f.keys(), rec, bad, flip.proof, "m"));
  }
  // Swapping only one half is neither R nor swap(R).
  auto half = keep.output;
  std::swap(half[4], half[6]);
  CHECK_FALSE(verify_micro_mix(f.keys(), rec, half, keep.proof, "m"));
}

TEST_CASE("finalization commitment and confirmation code") {
  Fixture f(1, 1, 3, 8, 1, 4, "fin");
  const auto fc = generate_fin_conf(f.params, "voter-1", f.c.pk, f.rng);
  CHECK(fc.finalization_code.size() == 26);
  CHECK(open_finalization("voter-1", fc.finalization_code, fc.fin_commitment));
  CHECK_FALSE(open_finalization("voter-1", fc.finalization_code + "x", fc.fin_commitment));
  CHECK_FALSE(open_finalization("voter-2", fc.finalization_code, fc.fin_commitment));
  CHECK(extract_integer(decrypt(f.c.sk, fc.conf_ciphertext)) == fc.confirmation_code);
  CHECK(fc.confirmation_code >= 1);
  CHECK(fc.confirmation_code <= conf_code_limit(*f.params));
}

TEST_CASE("code table generation links sheets and tables") {
  Fixture f(3, 2, 3, 8, 3, 8, "pipeline");
  const auto res = generate_code_tables(f.setup, f.p, f.rng);
  CHECK(verify_codegen(f.setup, res.transcript));
  REQUIRE(res.sheets.size() == 3);
  REQUIRE(res.transcript.table.size() == 3);

  for (int option = 1; option <= 2; ++option) {
    std::set<std::uint64_t> codes;
    for (const auto& sheet : res.sheets) {
      codes.insert(sheet.return_codes[static_cast<std::size_t>(option - 1)][0]);
      codes.insert(sheet.return_codes[static_cast<std::size_t>(option - 1)][1]);
    }
    CHECK(codes.size() == 6);
  }

  for (std::size_t v = 0; v < 3; ++v) {
    const auto& sheet = res.sheets[v];
    const auto& row = res.transcript.table[v];
    CHECK(row.voter_id == sheet.voter_id);
    CHECK(open_finalization(sheet.voter_id, sheet.finalization_code, row.fin_commitment));
    CHECK(extract_integer(decrypt(f.c.sk, row.conf_ciphertext)) == sheet.confirmation_code);
    for (int j = 1; j <= 2; ++j) {
      const auto i = static_cast<std::size_t>(j - 1);
      const int b = sheet.flip_bits[i] ? 1 : 0;
      for (int vbit = 0; vbit <= 1; ++vbit) {
        const auto& cell = row.cells[i][static_cast<std::size_t>(b ^ vbit)];
        const auto choice = decrypt(f.e.sk, cell.choice);
        CHECK(choice == (vbit ? f.setup.options.gamma(j) : GroupElement::identity(f.params)));
        CHECK(f.code_of(cell.code, j) == sheet.return_codes[i][static_cast<std::size_t>(vbit)]);
      }
    }
  }
}

TEST_CASE("flip bits are the XOR of the tellers' bits") {
  Fixture f(2, 2, 3, 8, 3, 2, "xor");
  for (unsigned pattern = 0; pattern < 8; ++pattern) {
    CodegenHooks hooks;
    hooks.force_flip = [pattern](int teller, int, int) -> std::optional<bool> { return (pattern >> (teller - 1)) & 1; };
    Rng rng("xor-" + std::to_string(pattern));
    const auto res = generate_code_tables(f.setup, f.p, rng, hooks);
    const bool expected = __builtin_popcount(pattern) & 1;
    for (const auto& sheet : res.sheets)
      for (bool b : sheet.flip_bits) CHECK(b == expected);
  }
}

TEST_CASE("one honest teller makes flip bits uniform") {
  Fixture f(4, 2, 3, 8, 3, 1, "uniform");
  CodegenHooks hooks;
  // Tellers 1 and 3 always flip; teller 2 is honest.
  hooks.force_flip = [](int teller, int, int) -> std::optional<bool> {
    if (teller == 2) return std::nullopt;
    return true;
  };
  int ones = 0;
  int total = 0;
  for (int run = 0; run < 25; ++run) {
    Rng rng("uniform-" + std::to_string(run));
    const auto res = generate_code_tables(f.setup, f.p, rng, hooks);
    for (const auto& sheet : res.sheets)
      for (bool b : sheet.flip_bits) {
        ones += b;
        ++total;
      }
  }
  const double expected = total / 2.0;
  const double chi2 = 2 * (ones - expected) * (ones - expected) / expected;
  CHECK(total == 200);
  CHECK(chi2 < 6.63);  // 1 degree of freedom, 99%
}

TEST_CASE("verify_codegen rejects tampered transcripts") {
  Fixture f(2, 2, 3, 8, 2, 8, "tamper");
  const auto res = generate_code_tables(f.setup, f.p, f.rng);
  REQUIRE(verify_codegen(f.setup, res.transcript));
  const auto g = GroupElement::generator(f.params);

  SUBCASE("shuffle output") {
    auto tr = res.transcript;
    tr.shuffles[1].output[4].print.a = tr.shuffles[1].output[4].print.a * g;
    CHECK_FALSE(verify_codegen(f.setup, tr));
  }
  SUBCASE("micro-mix output") {
    auto tr = res.transcript;
    tr.micro_mixes[0].output[2][5].b = tr.micro_mixes[0].output[2][5].b * g;
    CHECK_FALSE(verify_codegen(f.setup, tr));
  }
  SUBCASE("omitted micro-mix proof") {
    auto tr = res.transcript;
    tr.micro_mixes[1].proofs.pop_back();
    CHECK_FALSE(verify_codegen(f.setup, tr));
    tr = res.transcript;
    tr.micro_mixes.pop_back();
    CHECK_FALSE(verify_codegen(f.setup, tr));
  }
  SUBCASE("table cell") {
    auto tr = res.transcript;
    std::swap(tr.table[0].cells[1][0], tr.table[0].cells[1][1]);
    CHECK_FALSE(verify_codegen(f.setup, tr));
  }
  SUBCASE("active teller caught through the hook") {
    CodegenHooks hooks;
    hooks.tamper_shuffle = [&](ShuffleStep& s) {
      if (s.teller == 2 && s.option == 1) std::swap(s.output[0].code, s.output[1].code);
    };
    Rng rng("active");
    const auto bad = generate_code_tables(f.setup, f.p, rng, hooks);
    const auto reason = check_codegen(f.setup, bad.transcript);
    REQUIRE(reason.has_value());
    CHECK(reason->find("teller-2") != std::string::npos);
  }
}

TEST_CASE("setup errors") {
  Fixture f(5, 1, 3, 8, 1, 2, "errors");
  CHECK_THROWS_AS(generate_code_tables(f.setup, f.p, f.rng), InvalidArgument);  // m < 2n
  Fixture g(1, 1, 3, 8, 1, 2, "errors2");
  CHECK_THROWS_AS(generate_code_tables(g.setup, g.e, g.rng), InvalidArgument);  // wrong printing key
}

TEST_CASE("sheet text") {
  BallotSheet s{"voter-1", "auth", "fin", 42, {true}, {{3, 7}}};
  const auto text = sheet_to_text(s);
  CHECK(text.find("option 1: no=3 yes=7 flip=1") != std::string::npos);
  CHECK(text.find("confirmation code: 42") != std::string::npos);
}
