#pragma once

#include "jred/program.hpp"

namespace jred {

// minimize <C, X> + c_free^T z  s.t.  <A_i, X> + (F z)_i = b_i, X psd, z free.
struct MixedProgram {
  ConicProgram cone;
  Eigen::MatrixXd free_columns;  // F, m x (number of free variables)
  Eigen::VectorXd free_cost;
};

// Result of eliminating the free variables. Objective values of the original
// equal those of `program` plus `objective_offset`.
struct FreeElimination {
  ConicProgram program;
  double objective_offset = 0;
  // Constraints that touch a free variable and the map from their residual
  // b_i - <A_i, X> to z.
  std::vector<int> rows;
  Eigen::MatrixXd recover;
  ConicProgram original;

  // Free variables completing a feasible X of `program`; components the
  // constraints leave undetermined are zero.
  Eigen::VectorXd back_substitute(const SymBlockMatrix& x) const;
};

// Orthogonal factorization of the free columns. Constraints untouched by
// free variables are kept as they are. Throws InfeasibleAffineError when the
// remaining equations are inconsistent and DomainError when the objective is
// unbounded along the free variables.
FreeElimination eliminate_free_variables(const MixedProgram& mixed, double tol = kDefaultTol);

}  // namespace jred
