#include "rcv/sigma.hpp"

#include "rcv/error.hpp"

namespace rcv {

namespace {

void absorb(FiatShamir& fs, const EqDlogStatement& st) {
  fs.add("g1", st.g1.value()).add("h1", st.h1.value()).add("g2", st.g2.value()).add("h2", st.h2.value());
}

Scalar hash_challenge(const FiatShamir& fs, const ParamsPtr& params) {
  return Scalar(params, fs.challenge(params->q));
}

}  // namespace

SchnorrProof prove_dlog(const GroupElement& base, const GroupElement& statement, const Scalar& witness,
                        FiatShamir transcript, Rng& rng) {
  const auto& params = base.params();
  const Scalar nonce = Scalar::random(params, rng);
  const GroupElement commitment = base.pow(nonce);
  transcript.add("base", base.value()).add("statement", statement.value()).add("commitment", commitment.value());
  const Scalar challenge = hash_challenge(transcript, params);
  return SchnorrProof{commitment, challenge, nonce + challenge * witness};
}

bool verify_dlog(const GroupElement& base, const GroupElement& statement, const SchnorrProof& proof,
                 FiatShamir transcript) {
  transcript.add("base", base.value())
      .add("statement", statement.value())
      .add("commitment", proof.commitment.value());
  const Scalar challenge = hash_challenge(transcript, base.params());
  if (!(challenge == proof.challenge)) return false;
  return base.pow(proof.response) == proof.commitment * statement.pow(proof.challenge);
}

EqDlogProof prove_eq_dlog(const EqDlogStatement& st, const Scalar& witness, FiatShamir transcript, Rng& rng) {
  const auto& params = st.g1.params();
  const Scalar nonce = Scalar::random(params, rng);
  const GroupElement t1 = st.g1.pow(nonce);
  const GroupElement t2 = st.g2.pow(nonce);
  absorb(transcript, st);
  transcript.add("t1", t1.value()).add("t2", t2.value());
  const Scalar challenge = hash_challenge(transcript, params);
  return EqDlogProof{t1, t2, challenge, nonce + challenge * witness};
}

bool verify_eq_dlog(const EqDlogStatement& st, const EqDlogProof& proof, FiatShamir transcript) {
  absorb(transcript, st);
  transcript.add("t1", proof.commitment1.value()).add("t2", proof.commitment2.value());
  const Scalar challenge = hash_challenge(transcript, st.g1.params());
  if (!(challenge == proof.challenge)) return false;
  return st.g1.pow(proof.response) == proof.commitment1 * st.h1.pow(proof.challenge) &&
         st.g2.pow(proof.response) == proof.commitment2 * st.h2.pow(proof.challenge);
}

OrProof prove_or(const std::vector<std::vector<EqDlogStatement>>& branches, std::size_t true_branch,
                 const std::vector<Scalar>& witnesses, FiatShamir transcript, Rng& rng) {
  if (branches.empty() || true_branch >= branches.size())
    throw InvalidArgument("disjunctive proof needs a valid true branch");
  if (witnesses.size() != branches[true_branch].size())
    throw InvalidArgument("witness count does not match the true branch");
  const auto& params = branches[true_branch].front().g1.params();

  OrProof proof;
  proof.branches.resize(branches.size(), OrBranch{Scalar::zero(params), {}});
  std::vector<Scalar> nonces;
  Scalar simulated_sum = Scalar::zero(params);

  for (std::size_t b = 0; b < branches.size(); ++b) {
    auto& out = proof.branches[b];
    if (b == true_branch) {
      for (const auto& st : branches[b]) {
        Scalar nonce = Scalar::random(params, rng);
        out.terms.push_back(OrTerm{st.g1.pow(nonce), st.g2.pow(nonce), Scalar::zero(params)});
        nonces.push_back(std::move(nonce));
      }
    } else {
      out.challenge = Scalar::random(params, rng);
      simulated_sum += out.challenge;
      for (const auto& st : branches[b]) {
        const Scalar response = Scalar::random(params, rng);
        const Scalar neg = -out.challenge;
        out.terms.push_back(
            OrTerm{st.g1.pow(response) * st.h1.pow(neg), st.g2.pow(response) * st.h2.pow(neg), response});
      }
    }
  }

  for (std::size_t b = 0; b < branches.size(); ++b) {
    transcript.add("branch", static_cast<std::uint64_t>(b));
    for (std::size_t i = 0; i < branches[b].size(); ++i) {
      absorb(transcript, branches[b][i]);
      transcript.add("t1", proof.branches[b].terms[i].commitment1.value())
          .add("t2", proof.branches[b].terms[i].commitment2.value());
    }
  }
  const Scalar master = hash_challenge(transcript, params);
  auto& real = proof.branches[true_branch];
  real.challenge = master - simulated_sum;
  for (std::size_t i = 0; i < real.terms.size(); ++i)
    real.terms[i].response = nonces[i] + real.challenge * witnesses[i];
  return proof;
}

bool verify_or(const std::vector<std::vector<EqDlogStatement>>& branches, const OrProof& proof,
               FiatShamir transcript) {
  if (branches.empty() || proof.branches.size() != branches.size()) return false;
  const auto& params = branches.front().front().g1.params();
  Scalar sum = Scalar::zero(params);
  for (std::size_t b = 0; b < branches.size(); ++b) {
    const auto& pb = proof.branches[b];
    if (pb.terms.size() != branches[b].size()) return false;
    transcript.add("branch", static_cast<std::uint64_t>(b));
    for (std::size_t i = 0; i < branches[b].size(); ++i) {
      const auto& st = branches[b][i];
      const auto& term = pb.terms[i];
      absorb(transcript, st);
      transcript.add("t1", term.commitment1.value()).add("t2", term.commitment2.value());
      if (st.g1.pow(term.response) != term.commitment1 * st.h1.pow(pb.challenge)) return false;
      if (st.g2.pow(term.response) != term.commitment2 * st.h2.pow(pb.challenge)) return false;
    }
    sum += pb.challenge;
  }
  return sum == hash_challenge(transcript, params);
}

}  // namespace rcv
