#pragma once

#include <cstddef>
#include <vector>

#include "rcv/group.hpp"
#include "rcv/hash.hpp"

namespace rcv {

/// Non-interactive proof of knowledge of x with statement = base^x.
/// Holds iff base^response == commitment * statement^challenge and the
/// challenge is the transcript hash.
struct SchnorrProof {
  GroupElement commitment;
  Scalar challenge;
  Scalar response;
};

SchnorrProof prove_dlog(const GroupElement& base, const GroupElement& statement, const Scalar& witness,
                        FiatShamir transcript, Rng& rng);
bool verify_dlog(const GroupElement& base, const GroupElement& statement, const SchnorrProof& proof,
                 FiatShamir transcript);

/// Statement: there is x with h1 = g1^x and h2 = g2^x.
struct EqDlogStatement {
  GroupElement g1;
  GroupElement h1;
  GroupElement g2;
  GroupElement h2;
};

/// Chaum-Pedersen proof.
struct EqDlogProof {
  GroupElement commitment1;
  GroupElement commitment2;
  Scalar challenge;
  Scalar response;
};

EqDlogProof prove_eq_dlog(const EqDlogStatement& st, const Scalar& witness, FiatShamir transcript, Rng& rng);
bool verify_eq_dlog(const EqDlogStatement& st, const EqDlogProof& proof, FiatShamir transcript);

/// One conjunct inside a disjunctive proof branch.
struct OrTerm {
  GroupElement commitment1;
  GroupElement commitment2;
  Scalar response;
};

struct OrBranch {
  Scalar challenge;
  std::vector<OrTerm> terms;
};

/// Disjunction of conjunctions of equal-discrete-log statements. Branch
/// challenges sum (mod q) to the transcript hash; every term satisfies its
/// Chaum-Pedersen equations under its branch challenge.
struct OrProof {
  std::vector<OrBranch> branches;
};

/// `branches[i]` is the list of conjuncts of branch i. The prover knows one
/// witness per conjunct of branch `true_branch`; every other branch is
/// simulated.
OrProof prove_or(const std::vector<std::vector<EqDlogStatement>>& branches, std::size_t true_branch,
                 const std::vector<Scalar>& witnesses, FiatShamir transcript, Rng& rng);
bool verify_or(const std::vector<std::vector<EqDlogStatement>>& branches, const OrProof& proof,
               FiatShamir transcript);

}  // namespace rcv
