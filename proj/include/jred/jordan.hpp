#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "jred/symspace.hpp"

namespace jred {

enum class IsoClass { kRealSym, kComplexHerm, kQuaternionHerm, kSpin, kUnclassified };

std::string_view to_string(IsoClass c);

struct Ideal {
  SubspaceBasis basis;
  SymBlockMatrix unit;  // central idempotent
  int dim = 0;
  int rank = 0;
  IsoClass iso_class = IsoClass::kUnclassified;
  std::vector<SymBlockMatrix> frame;  // primitive idempotents, filled by construct_isomorphism
};

// Ranks sorted in descending order.
struct RankTuple {
  std::vector<int> ranks;

  RankTuple() = default;
  explicit RankTuple(std::vector<int> r);
  int sum() const;
  bool operator==(const RankTuple& o) const { return ranks == o.ranks; }
};

// Explicit map from a product of S^{r_i} onto the subspace, in svec
// coordinates. Each ideal of multiplicity m contributes a block of order
// rank with Phi* Phi = m I on it.
struct JordanMap {
  BlockStructure ambient;
  BlockStructure reduced;
  Eigen::MatrixXd phi;        // ambient dim x reduced dim
  Eigen::VectorXd gram_diag;  // diagonal of Phi* Phi
  std::vector<int> multiplicity;

  SymBlockMatrix apply(const SymBlockMatrix& xhat) const;
  // Phi*(X).
  SymBlockMatrix adjoint(const SymBlockMatrix& x) const;
  // (Phi* Phi)^{-1} Phi*(X): the preimage of X when X lies in the range.
  SymBlockMatrix preimage(const SymBlockMatrix& x) const;
};

struct IdealDecomposition {
  std::vector<Ideal> ideals;
  SubspaceBasis subspace;
  std::optional<JordanMap> phi;

  RankTuple ranks() const;
  bool all_real() const;
};

IdealDecomposition decompose_ideals(const SubspaceBasis& s, std::uint64_t seed = 0, double tol = kDefaultTol);

int ideal_rank(const Ideal& ideal, std::uint64_t seed = 0, double tol = kDefaultTol);

IsoClass classify_ideal(int dim, int rank);
inline IsoClass classify_ideal(const Ideal& ideal) { return classify_ideal(ideal.dim, ideal.rank); }

// Nullopt when some ideal is not of real symmetric type. Fills the frames of
// the ideals it handles.
std::optional<JordanMap> construct_isomorphism(IdealDecomposition& decomp, std::uint64_t seed = 0,
                                               double tol = kDefaultTol);

// Matrix of v -> X o v in the orthonormal basis of s.
Eigen::MatrixXd multiplication_operator(const SubspaceBasis& s, const SymBlockMatrix& x);
bool cone_membership(const SubspaceBasis& s, const SymBlockMatrix& x, double tol = 1e-8);

bool weakly_majorizes(const RankTuple& x, const RankTuple& y);

}  // namespace jred
