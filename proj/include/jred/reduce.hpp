#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jred/combinat.hpp"
#include "jred/jordan.hpp"
#include "jred/program.hpp"
#include "jred/subspace.hpp"

namespace jred {

enum class ReducedForm { kIsomorphic, kRestriction };

std::string_view to_string(ReducedForm f);

struct ReducedProgram {
  ConicProgram program;
  ReducedForm form = ReducedForm::kRestriction;
  BlockStructure original;
  SubspaceBasis subspace;
  // Set instead of `subspace` by reformulate_coordinate.
  std::optional<SymRelation> relation;
  // Isomorphic form only: svec map from the reduced space into the original
  // and the diagonal of (Phi* Phi)^{-1}.
  Eigen::MatrixXd phi;
  Eigen::VectorXd gram_inverse;
  std::vector<int> kept_constraints;
};

// Indices of a maximal linearly independent subset of the rows, preferring
// earlier rows. Rows with relative residual at most tol are dependent.
std::vector<int> independent_rows(const std::vector<Eigen::VectorXd>& rows, double tol = kDefaultTol);

ReducedProgram reformulate_restriction(const ConicProgram& program, const SubspaceBasis& s, double tol = kDefaultTol);
// Restriction to a coordinate subspace: entries outside the relation are
// zeroed. The subspace basis is left empty, so large relations stay cheap.
ReducedProgram reformulate_coordinate(const ConicProgram& program, const SymRelation& r, double tol = kDefaultTol);

// Nullopt when the decomposition has an ideal without an explicit map.
std::optional<ReducedProgram> reformulate_isomorphic(const ConicProgram& program, IdealDecomposition& decomp,
                                                     std::uint64_t seed = 0, double tol = kDefaultTol);

// Orthogonal projection onto the subspace the reduction restricts to.
SymBlockMatrix project_subspace(const ReducedProgram& red, const SymBlockMatrix& x);

// Restriction-form points lift through the projection, which is the
// identity on points already in the subspace.
SymBlockMatrix lift_primal(const ReducedProgram& red, const SymBlockMatrix& xhat);
SymBlockMatrix lift_dual(const ReducedProgram& red, const SymBlockMatrix& shat);

struct VerificationHint {
  SymBlockMatrix x0;  // strictly feasible primal point
  SymBlockMatrix s0;  // strictly feasible dual slack
  Eigen::VectorXd y0;
};

struct VerificationReport {
  bool admissible = false;
  double map_gram_residual = 0;     // |Phi* Phi - diag| (isomorphic form)
  double map_range_residual = 0;    // columns of Phi outside S
  double homomorphism_residual = 0;  // |Phi(u o v) - Phi(u) o Phi(v)| relative
  int primal_samples = 0;
  int dual_samples = 0;
  double primal_affine_residual = 0;
  double primal_objective_gap = 0;
  double primal_cone_violation = 0;
  double dual_affine_residual = 0;
  double dual_objective_gap = 0;
  double dual_cone_violation = 0;
  std::vector<std::string> failures;

  bool passed() const { return failures.empty(); }
};

// Audits a reduction: admissibility of the subspace, the transport map, and
// feasibility and objective preservation of sampled points in both
// directions. Samples use the hint when given; otherwise a feasible point
// is searched for by alternating projections.
VerificationReport verify_reduction(const ConicProgram& program, const ReducedProgram& red, int samples,
                                    std::uint64_t seed = 0, const std::optional<VerificationHint>& hint = std::nullopt);

}  // namespace jred
