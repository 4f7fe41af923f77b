#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jred/program.hpp"
#include "jred/symspace.hpp"

namespace jred {

// Orthogonal projector onto L-perp = span{A_i}. Constraints are grouped by
// shared support; each group carries a dense local orthonormal basis, so
// programs with many small disjoint constraints stay cheap.
class LperpProjector {
 public:
  struct Component {
    std::vector<Index> positions;  // sorted svec positions
    Eigen::MatrixXd q;             // positions.size() x rank
    std::vector<int> rows;         // constraint indices in this group
    std::vector<int> kept;         // rows that contributed a basis vector
  };

  LperpProjector() = default;
  LperpProjector(const ConicProgram& program, double tol = kDefaultTol);

  const BlockStructure& structure() const { return structure_; }
  const std::vector<Component>& components() const { return comps_; }
  int rank() const;
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  SymBlockMatrix apply(const SymBlockMatrix& x) const;
  // Min-norm point of {Y : <A_i, Y> = b_i}.
  const Eigen::VectorXd& min_norm_point() const { return y_; }
  // Constraint indices that form a basis of L-perp, ascending.
  std::vector<int> kept_rows() const;
  SubspaceBasis basis() const;

 private:
  BlockStructure structure_;
  std::vector<Component> comps_;
  Eigen::VectorXd y_;
};

struct AffineData {
  BlockStructure structure;
  LperpProjector lperp;
  Eigen::VectorXd b;
  SymBlockMatrix C;
  SymBlockMatrix C_L;
  SymBlockMatrix Y_Lperp;

  SymBlockMatrix project_L(const SymBlockMatrix& x) const { return x - lperp.apply(x); }
  Eigen::VectorXd project_L(const Eigen::VectorXd& x) const { return x - lperp.apply(x); }
  SymBlockMatrix project_Lperp(const SymBlockMatrix& x) const { return lperp.apply(x); }
  SubspaceBasis Lperp_basis() const { return lperp.basis(); }
};

AffineData build_affine_data(const ConicProgram& program, double tol = kDefaultTol);

struct AdmissibilityReport {
  bool contains_points = false;
  bool L_invariant = false;
  bool square_closed = false;
  double points_residual = 0;
  double L_residual = 0;
  double square_residual = 0;
  bool all() const { return contains_points && L_invariant && square_closed; }
};

// Exact pairwise products up to 64 basis elements, seeded random squares above.
AdmissibilityReport check_admissible(const SubspaceBasis& s, const AffineData& aff, double tol = 1e-8,
                                     std::uint64_t seed = 0);

struct ClosureTrace {
  std::vector<int> dims;  // dimension after each outer iteration
  std::vector<std::string> diagnostics;
};

SubspaceBasis optimal_admissible_subspace(const AffineData& aff, double tol = kDefaultTol,
                                          std::uint64_t seed = 0, ClosureTrace* trace = nullptr);

// Smallest subspace containing `start` that is closed under squaring.
SubspaceBasis square_closure(const SubspaceBasis& start, double tol = kDefaultTol);

// Unit element of a Jordan subalgebra: the projector onto the range of a
// maximum-rank element.
SymBlockMatrix unit_element(const SubspaceBasis& s, std::uint64_t seed = 0, double tol = kDefaultTol);

// Symmetric part of the *-algebra generated by C and the A_i.
// `cap` bounds the intermediate dimension (0: sum of n_k^2).
SubspaceBasis star_algebra_subspace(const ConicProgram& program, double tol = kDefaultTol, long cap = 0);
long star_algebra_dimension(const ConicProgram& program, double tol = kDefaultTol, long cap = 0);

}  // namespace jred
