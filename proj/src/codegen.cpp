#include "rcv/codegen.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "rcv/error.hpp"

namespace rcv {

namespace {

constexpr std::array<std::size_t, kRecordSlots> kSwap{2, 3, 0, 1, 6, 7, 4, 5};
constexpr char kBase32[] = "abcdefghijkmnpqrstuvwxyz23456789";

void add_ct(FiatShamir& fs, const Ciphertext& c) {
  fs.add("a", c.a.value());
  fs.add("b", c.b.value());
}

void add_pairs(FiatShamir& fs, std::string_view label, const std::vector<CodePair>& list) {
  fs.add(label, static_cast<std::uint64_t>(list.size()));
  for (const auto& p : list) {
    add_ct(fs, p.code);
    add_ct(fs, p.print);
  }
}

void add_record(FiatShamir& fs, const Record& r) {
  for (const auto& c : r) add_ct(fs, c);
}

std::vector<bool> shuffle_challenge(const CodegenKeys& keys, const std::vector<CodePair>& input,
                                    const std::vector<CodePair>& output,
                                    const std::vector<std::vector<CodePair>>& shadows, const std::string& context) {
  FiatShamir fs("rcv/shuffle");
  fs.add("context", context);
  fs.add("pk_c", keys.pk_c.value());
  fs.add("pk_p", keys.pk_p.value());
  add_pairs(fs, "input", input);
  add_pairs(fs, "output", output);
  for (const auto& s : shadows) add_pairs(fs, "shadow", s);
  std::vector<bool> bits;
  for (std::uint64_t block = 0; bits.size() < shadows.size(); ++block) {
    FiatShamir expand = fs;
    expand.add("block", block);
    const Digest d = expand.digest();
    for (std::size_t i = 0; i < d.size() * 8 && bits.size() < shadows.size(); ++i)
      bits.push_back((d[i / 8] >> (i % 8)) & 1);
  }
  return bits;
}

bool is_permutation(const std::vector<std::size_t>& perm, std::size_t n) {
  if (perm.size() != n) return false;
  std::vector<bool> seen(n, false);
  for (auto i : perm) {
    if (i >= n || seen[i]) return false;
    seen[i] = true;
  }
  return true;
}

bool opening_links(const CodegenKeys& keys, const std::vector<CodePair>& from, const std::vector<CodePair>& to,
                   const ShuffleOpening& op) {
  const std::size_t n = from.size();
  if (to.size() != n || !is_permutation(op.permutation, n) || op.code_r.size() != n || op.print_r.size() != n)
    return false;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& src = from[op.permutation[i]];
    if (reencrypt(keys.pk_c, src.code, op.code_r[i]) != to[i].code) return false;
    if (reencrypt(keys.pk_p, src.print, op.print_r[i]) != to[i].print) return false;
  }
  return true;
}

ShuffleOpening random_opening(const ParamsPtr& params, std::size_t n, Rng& rng) {
  ShuffleOpening op;
  op.permutation.resize(n);
  std::iota(op.permutation.begin(), op.permutation.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(op.permutation[i - 1], op.permutation[rng.below(std::uint64_t{i})]);
  for (std::size_t i = 0; i < n; ++i) {
    op.code_r.push_back(Scalar::random(params, rng));
    op.print_r.push_back(Scalar::random(params, rng));
  }
  return op;
}

std::vector<Scalar> mix_weights(const CodegenKeys& keys, const Record& input, const Record& output,
                                const std::string& context) {
  FiatShamir fs("rcv/micro-mix-weights");
  fs.add("context", context);
  add_record(fs, input);
  add_record(fs, output);
  const auto& params = keys.pk_e.params();
  std::vector<Scalar> w;
  for (std::size_t s = 0; s < kRecordSlots; ++s) {
    FiatShamir slot = fs;
    slot.add("slot", static_cast<std::uint64_t>(s));
    w.emplace_back(params, slot.challenge(params->q));
  }
  return w;
}

// Slots grouped by key: printing, election, code.
const std::array<std::vector<std::size_t>, 3>& domains() {
  static const std::array<std::vector<std::size_t>, 3> d{
      std::vector<std::size_t>{0, 1, 2, 3}, std::vector<std::size_t>{4, 6}, std::vector<std::size_t>{5, 7}};
  return d;
}

std::vector<EqDlogStatement> branch_statements(const CodegenKeys& keys, const Record& candidate,
                                               const Record& output, const std::vector<Scalar>& w) {
  const auto& params = keys.pk_e.params();
  const auto g = GroupElement::generator(params);
  std::vector<EqDlogStatement> out;
  for (const auto& dom : domains()) {
    auto a = GroupElement::identity(params);
    auto b = GroupElement::identity(params);
    for (auto s : dom) {
      const Ciphertext diff = output[s] / candidate[s];
      a *= diff.a.pow(w[s]);
      b *= diff.b.pow(w[s]);
    }
    out.push_back(EqDlogStatement{g, a, slot_key(keys, dom.front()), b});
  }
  return out;
}

bool record_shape_ok(const Record& r) { return r.size() == kRecordSlots; }

std::string random_base32(Rng& rng, std::size_t len) {
  std::string out;
  for (std::size_t i = 0; i < len; ++i) out.push_back(kBase32[rng.below(std::uint64_t{32})]);
  return out;
}

}  // namespace

GroupElement print_plaintext(const ParamsPtr& params, std::uint64_t code) {
  return embed_integer(params, mpz_class(std::to_string(code)));
}

std::vector<CodePair> generate_code_lists(const CodeEncoding& codes, int option, const CodegenKeys& keys) {
  std::vector<CodePair> out;
  out.reserve(codes.code_space());
  for (std::uint64_t c = 1; c <= codes.code_space(); ++c) {
    out.push_back(CodePair{encrypt_deterministic(keys.pk_c, codes.delta(option, c)),
                           encrypt_deterministic(keys.pk_p, print_plaintext(codes.params(), c))});
  }
  return out;
}

std::vector<CodePair> apply_shuffle(const CodegenKeys& keys, const std::vector<CodePair>& input,
                                    const ShuffleOpening& opening) {
  if (!is_permutation(opening.permutation, input.size()) || opening.code_r.size() != input.size() ||
      opening.print_r.size() != input.size())
    throw InvalidArgument("shuffle opening does not match the input size");
  std::vector<CodePair> out;
  out.reserve(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) {
    const auto& src = input[opening.permutation[i]];
    out.push_back(CodePair{reencrypt(keys.pk_c, src.code, opening.code_r[i]),
                           reencrypt(keys.pk_p, src.print, opening.print_r[i])});
  }
  return out;
}

ShuffleResult paired_shuffle(const CodegenKeys& keys, const std::vector<CodePair>& input, int lambda,
                             const std::string& context, Rng& rng) {
  const auto mix = random_opening(keys.pk_c.params(), input.size(), rng);
  return paired_shuffle(keys, input, mix, lambda, context, rng);
}

ShuffleResult paired_shuffle(const CodegenKeys& keys, const std::vector<CodePair>& input, const ShuffleOpening& mix,
                             int lambda, const std::string& context, Rng& rng) {
  if (lambda < 1) throw InvalidArgument("lambda must be positive");
  const auto& params = keys.pk_c.params();
  const std::size_t n = input.size();
  ShuffleResult res{apply_shuffle(keys, input, mix), {}};

  std::vector<ShuffleOpening> secret;
  for (int s = 0; s < lambda; ++s) {
    secret.push_back(random_opening(params, n, rng));
    res.proof.shadows.push_back(apply_shuffle(keys, input, secret.back()));
  }
  const auto bits = shuffle_challenge(keys, input, res.output, res.proof.shadows, context);
  for (int s = 0; s < lambda; ++s) {
    const auto& sh = secret[static_cast<std::size_t>(s)];
    if (!bits[static_cast<std::size_t>(s)]) {
      res.proof.openings.push_back(sh);
      continue;
    }
    // output[i] = input[pi(i)] re-encrypted by r_i, shadow[j] = input[sigma(j)]
    // by rho_j, so output[i] = shadow[sigma^-1(pi(i))] re-encrypted by r_i - rho.
    std::vector<std::size_t> sigma_inv(n);
    for (std::size_t j = 0; j < n; ++j) sigma_inv[sh.permutation[j]] = j;
    ShuffleOpening op;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = sigma_inv[mix.permutation[i]];
      op.permutation.push_back(j);
      op.code_r.push_back(mix.code_r[i] - sh.code_r[j]);
      op.print_r.push_back(mix.print_r[i] - sh.print_r[j]);
    }
    res.proof.openings.push_back(std::move(op));
  }
  return res;
}

bool verify_shuffle(const CodegenKeys& keys, const std::vector<CodePair>& input, const std::vector<CodePair>& output,
                    const MixProof& proof, int lambda, const std::string& context) {
  if (lambda < 1 || proof.shadows.size() != static_cast<std::size_t>(lambda) ||
      proof.openings.size() != proof.shadows.size() || output.size() != input.size())
    return false;
  const auto bits = shuffle_challenge(keys, input, output, proof.shadows, context);
  for (std::size_t s = 0; s < proof.shadows.size(); ++s) {
    const bool ok = bits[s] ? opening_links(keys, proof.shadows[s], output, proof.openings[s])
                            : opening_links(keys, input, proof.shadows[s], proof.openings[s]);
    if (!ok) return false;
  }
  return true;
}

const GroupElement& slot_key(const CodegenKeys& keys, std::size_t slot) {
  if (slot < 4) return keys.pk_p;
  if (slot == 4 || slot == 6) return keys.pk_e;
  if (slot == 5 || slot == 7) return keys.pk_c;
  throw InvalidArgument("record slot out of range");
}

Record swap_record(const Record& r) {
  if (!record_shape_ok(r)) throw InvalidArgument("record must have 8 slots");
  Record out;
  for (auto s : kSwap) out.push_back(r[s]);
  return out;
}

std::vector<Record> assemble_records(const std::vector<std::vector<CodePair>>& shuffled, const OptionEncoding& options,
                                     const CodegenKeys& keys, int voters) {
  if (static_cast<int>(shuffled.size()) != options.options())
    throw InvalidArgument("need one shuffled list per option");
  for (const auto& list : shuffled)
    if (list.size() < 2 * static_cast<std::size_t>(voters)) throw InvalidArgument("code space smaller than 2n");
  const auto& params = options.params();
  const auto marker0 = encrypt_deterministic(keys.pk_p, print_plaintext(params, 1));
  const auto marker1 = encrypt_deterministic(keys.pk_p, print_plaintext(params, 2));
  const auto no = encrypt_deterministic(keys.pk_e, GroupElement::identity(params));
  std::vector<Record> out;
  for (int v = 0; v < voters; ++v) {
    for (int j = 1; j <= options.options(); ++j) {
      const auto& list = shuffled[static_cast<std::size_t>(j - 1)];
      const auto& c1 = list[2 * static_cast<std::size_t>(v)];
      const auto& c2 = list[2 * static_cast<std::size_t>(v) + 1];
      const auto yes = encrypt_deterministic(keys.pk_e, options.gamma(j));
      out.push_back(Record{marker0, c1.print, marker1, c2.print, no, c1.code, yes, c2.code});
    }
  }
  return out;
}

MicroMixResult micro_mix(const CodegenKeys& keys, const Record& input, bool flip, const std::string& context,
                         Rng& rng) {
  if (!record_shape_ok(input)) throw InvalidArgument("record must have 8 slots");
  const auto& params = keys.pk_e.params();
  const Record candidate = flip ? swap_record(input) : input;
  std::vector<Scalar> r;
  MicroMixResult res{{}, {}};
  for (std::size_t s = 0; s < kRecordSlots; ++s) {
    r.push_back(Scalar::random(params, rng));
    res.output.push_back(reencrypt(slot_key(keys, s), candidate[s], r.back()));
  }
  const auto w = mix_weights(keys, input, res.output, context);
  std::vector<Scalar> witnesses;
  for (const auto& dom : domains()) {
    Scalar acc = Scalar::zero(params);
    for (auto s : dom) acc += w[s] * r[s];
    witnesses.push_back(acc);
  }
  std::vector<std::vector<EqDlogStatement>> branches{branch_statements(keys, input, res.output, w),
                                                     branch_statements(keys, swap_record(input), res.output, w)};
  FiatShamir fs("rcv/micro-mix");
  fs.add("context", context);
  res.proof = prove_or(branches, flip ? 1 : 0, witnesses, fs, rng);
  return res;
}

bool verify_micro_mix(const CodegenKeys& keys, const Record& input, const Record& output, const OrProof& proof,
                      const std::string& context) {
  if (!record_shape_ok(input) || !record_shape_ok(output) || proof.branches.size() != 2) return false;
  const auto w = mix_weights(keys, input, output, context);
  std::vector<std::vector<EqDlogStatement>> branches{branch_statements(keys, input, output, w),
                                                     branch_statements(keys, swap_record(input), output, w)};
  FiatShamir fs("rcv/micro-mix");
  fs.add("context", context);
  return verify_or(branches, proof, fs);
}

std::string commit_finalization(const std::string& voter_id, const std::string& finalization_code) {
  FiatShamir fs("rcv/finalization-commitment");
  fs.add("voter", voter_id);
  fs.add("code", finalization_code);
  return to_hex(fs.digest());
}

bool open_finalization(const std::string& voter_id, const std::string& finalization_code,
                       const std::string& commitment) {
  return commit_finalization(voter_id, finalization_code) == commitment;
}

std::uint64_t conf_code_limit(const GroupParams& params) {
  constexpr std::uint64_t kMax = 99'999'999;
  if (params.q < kMax) return params.q.get_ui();
  return kMax;
}

FinConf generate_fin_conf(const ParamsPtr& params, const std::string& voter_id, const GroupElement& pk_c, Rng& rng) {
  const std::string fin = random_base32(rng, 26);
  const std::uint64_t conf = 1 + rng.below(conf_code_limit(*params));
  return FinConf{fin, commit_finalization(voter_id, fin), conf,
                 encrypt(pk_c, print_plaintext(params, conf), rng)};
}

std::string auth_digest(const std::string& auth_code) { return to_hex(sha256("rcv/auth\n" + auth_code)); }

std::string shuffle_context(int option, int teller) {
  return "shuffle/option-" + std::to_string(option) + "/teller-" + std::to_string(teller);
}

std::string micro_mix_context(int teller, int voter, int option) {
  return "micro-mix/teller-" + std::to_string(teller) + "/voter-" + std::to_string(voter) + "/option-" +
         std::to_string(option);
}

std::vector<CodeTableRow> table_from_records(const CodegenSetup& setup, const std::vector<Record>& final_records,
                                             const std::vector<FinConf>& fin_conf) {
  const int k = setup.options.options();
  std::vector<CodeTableRow> rows;
  for (std::size_t v = 0; v < setup.voter_ids.size(); ++v) {
    CodeTableRow row{setup.voter_ids[v], fin_conf[v].fin_commitment, fin_conf[v].conf_ciphertext, {}};
    for (int j = 0; j < k; ++j) {
      const auto& rec = final_records[v * static_cast<std::size_t>(k) + static_cast<std::size_t>(j)];
      row.cells.push_back({Cell{rec[4], rec[5]}, Cell{rec[6], rec[7]}});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<BallotSheet> split_outputs(const CodegenSetup& setup, const std::vector<Record>& final_records,
                                       const std::vector<FinConf>& fin_conf, const Scalar& printing_sk, Rng& rng) {
  const auto& params = setup.options.params();
  const int k = setup.options.options();
  const auto marker0 = print_plaintext(params, 1);
  const auto marker1 = print_plaintext(params, 2);
  const auto code_of = [&](const Ciphertext& c) {
    const mpz_class x = extract_integer(decrypt(printing_sk, c));
    if (x < 1 || x > setup.codes.code_space()) throw ProtocolError("printed code outside the code space");
    return x.get_ui();
  };
  std::vector<BallotSheet> sheets;
  for (std::size_t v = 0; v < setup.voter_ids.size(); ++v) {
    BallotSheet sheet;
    sheet.voter_id = setup.voter_ids[v];
    sheet.auth_code = random_base32(rng, 20);
    sheet.finalization_code = fin_conf[v].finalization_code;
    sheet.confirmation_code = fin_conf[v].confirmation_code;
    for (int j = 0; j < k; ++j) {
      const auto& rec = final_records[v * static_cast<std::size_t>(k) + static_cast<std::size_t>(j)];
      const auto first = decrypt(printing_sk, rec[0]);
      const auto second = decrypt(printing_sk, rec[2]);
      bool b;
      if (first == marker0 && second == marker1) {
        b = false;
      } else if (first == marker1 && second == marker0) {
        b = true;
      } else {
        throw ProtocolError("record markers do not decrypt to 0/1");
      }
      const std::uint64_t left = code_of(rec[1]);
      const std::uint64_t right = code_of(rec[3]);
      sheet.flip_bits.push_back(b);
      sheet.return_codes.push_back(b ? std::array<std::uint64_t, 2>{right, left}
                                     : std::array<std::uint64_t, 2>{left, right});
    }
    sheets.push_back(std::move(sheet));
  }
  return sheets;
}

CodegenResult generate_code_tables(const CodegenSetup& setup, const KeyPair& printing, Rng& rng,
                                   const CodegenHooks& hooks) {
  const auto& params = setup.options.params();
  const int k = setup.options.options();
  const int n = static_cast<int>(setup.voter_ids.size());
  if (setup.codes.options() != k) throw InvalidArgument("option count mismatch between encodings");
  if (setup.tellers.empty()) throw InvalidArgument("code generation needs at least one teller");
  if (setup.codes.code_space() < 2 * static_cast<std::uint64_t>(n)) throw InvalidArgument("code space smaller than 2n");
  if (printing.pk != setup.keys.pk_p) throw InvalidArgument("printing key does not match pk_p");

  CodegenResult res;
  std::vector<std::vector<CodePair>> current;
  for (int j = 1; j <= k; ++j) {
    auto list = generate_code_lists(setup.codes, j, setup.keys);
    for (int t : setup.tellers) {
      Rng trng = rng.fork(shuffle_context(j, t));
      auto sh = paired_shuffle(setup.keys, list, setup.lambda, shuffle_context(j, t), trng);
      ShuffleStep step{t, j, std::move(sh.output), std::move(sh.proof)};
      if (hooks.tamper_shuffle) hooks.tamper_shuffle(step);
      list = step.output;
      res.transcript.shuffles.push_back(std::move(step));
    }
    current.push_back(std::move(list));
  }

  auto records = assemble_records(current, setup.options, setup.keys, n);
  for (int t : setup.tellers) {
    Rng trng = rng.fork("micro-mix/teller-" + std::to_string(t));
    MicroMixStep step{t, {}, {}};
    for (int v = 0; v < n; ++v) {
      for (int j = 1; j <= k; ++j) {
        const auto& rec = records[static_cast<std::size_t>(v * k + j - 1)];
        bool flip = trng.next_bit();
        if (hooks.force_flip)
          if (auto forced = hooks.force_flip(t, v, j)) flip = *forced;
        auto mm = micro_mix(setup.keys, rec, flip, micro_mix_context(t, v, j), trng);
        step.output.push_back(std::move(mm.output));
        step.proofs.push_back(std::move(mm.proof));
      }
    }
    if (hooks.tamper_micro_mix) hooks.tamper_micro_mix(step);
    records = step.output;
    res.transcript.micro_mixes.push_back(std::move(step));
  }

  std::vector<FinConf> fin_conf;
  Rng frng = rng.fork("fin-conf");
  for (const auto& id : setup.voter_ids) fin_conf.push_back(generate_fin_conf(params, id, setup.keys.pk_c, frng));
  res.transcript.table = table_from_records(setup, records, fin_conf);
  Rng prng = rng.fork("printing");
  res.sheets = split_outputs(setup, records, fin_conf, printing.sk, prng);
  return res;
}

std::optional<std::string> check_codegen(const CodegenSetup& setup, const CodegenTranscript& tr) {
  const int k = setup.options.options();
  const std::size_t n = setup.voter_ids.size();
  const std::size_t tellers = setup.tellers.size();
  if (tr.shuffles.size() != static_cast<std::size_t>(k) * tellers) return "wrong number of shuffle steps";
  if (tr.micro_mixes.size() != tellers) return "wrong number of micro-mix steps";

  std::vector<std::vector<CodePair>> current;
  for (int j = 1; j <= k; ++j) {
    std::vector<CodePair> list = generate_code_lists(setup.codes, j, setup.keys);
    for (std::size_t ti = 0; ti < tellers; ++ti) {
      const auto& step = tr.shuffles[static_cast<std::size_t>(j - 1) * tellers + ti];
      const int t = setup.tellers[ti];
      if (step.teller != t || step.option != j) return "shuffle steps out of order";
      if (!verify_shuffle(setup.keys, list, step.output, step.proof, setup.lambda, shuffle_context(j, t)))
        return "shuffle proof rejected: " + shuffle_context(j, t);
      list = step.output;
    }
    current.push_back(std::move(list));
  }

  std::vector<Record> records;
  try {
    records = assemble_records(current, setup.options, setup.keys, static_cast<int>(n));
  } catch (const Error& e) {
    return std::string("record assembly failed: ") + e.what();
  }
  for (std::size_t ti = 0; ti < tellers; ++ti) {
    const auto& step = tr.micro_mixes[ti];
    const int t = setup.tellers[ti];
    if (step.teller != t) return "micro-mix steps out of order";
    if (step.output.size() != records.size() || step.proofs.size() != records.size())
      return "micro-mix step incomplete";
    for (std::size_t r = 0; r < records.size(); ++r) {
      const int v = static_cast<int>(r) / k;
      const int j = static_cast<int>(r) % k + 1;
      if (!verify_micro_mix(setup.keys, records[r], step.output[r], step.proofs[r], micro_mix_context(t, v, j)))
        return "micro-mix proof rejected: " + micro_mix_context(t, v, j);
    }
    records = step.output;
  }

  if (tr.table.size() != n) return "code table has the wrong number of rows";
  for (std::size_t v = 0; v < n; ++v) {
    const auto& row = tr.table[v];
    if (row.voter_id != setup.voter_ids[v]) return "code table rows out of order";
    if (row.fin_commitment.size() != 64) return "malformed finalization commitment";
    if (row.cells.size() != static_cast<std::size_t>(k)) return "code table row has the wrong number of cells";
    for (int j = 0; j < k; ++j) {
      const auto& rec = records[v * static_cast<std::size_t>(k) + static_cast<std::size_t>(j)];
      const auto& cell = row.cells[static_cast<std::size_t>(j)];
      if (!(cell[0] == Cell{rec[4], rec[5]}) || !(cell[1] == Cell{rec[6], rec[7]}))
        return "code table does not match the mixed records";
    }
  }
  return std::nullopt;
}

bool verify_codegen(const CodegenSetup& setup, const CodegenTranscript& transcript) {
  return !check_codegen(setup, transcript).has_value();
}

std::string sheet_to_text(const BallotSheet& sheet) {
  std::ostringstream out;
  out << "voter: " << sheet.voter_id << "\n";
  out << "authentication code: " << sheet.auth_code << "\n";
  out << "finalization code: " << sheet.finalization_code << "\n";
  out << "confirmation code: " << sheet.confirmation_code << "\n";
  for (std::size_t i = 0; i < sheet.return_codes.size(); ++i) {
    out << "option " << (i + 1) << ": no=" << sheet.return_codes[i][0] << " yes=" << sheet.return_codes[i][1]
        << " flip=" << (sheet.flip_bits[i] ? 1 : 0) << "\n";
  }
  return out.str();
}

}  // namespace rcv
