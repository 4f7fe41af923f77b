#pragma once

#include <vector>

#include "jred/program.hpp"
#include "jred/random.hpp"
#include "jred/symspace.hpp"

namespace jred::testing {

inline SymBlockMatrix random_sym(const BlockStructure& s, Rng& rng) {
  SymBlockMatrix x(s);
  for (int k = 0; k < s.num_blocks(); ++k)
    for (int j = 0; j < s.order(k); ++j)
      for (int i = 0; i <= j; ++i) x.set(k, i, j, rng.normal());
  return x;
}

inline SymBlockMatrix random_psd(const BlockStructure& s, Rng& rng) {
  SymBlockMatrix x(s);
  for (int k = 0; k < s.num_blocks(); ++k) {
    Eigen::MatrixXd g(s.order(k), s.order(k));
    for (Index i = 0; i < g.size(); ++i) g.data()[i] = rng.normal();
    x.block(k) = g * g.transpose();
  }
  return x;
}

inline SymBlockMatrix unit_matrix(const BlockStructure& s, int k, int i, int j) {
  SymBlockMatrix x(s);
  x.set(k, i, j, 1.0);
  return x;
}

// Sum of the given (block, i, j, value) entries as a sparse matrix.
inline SparseSymMatrix sparse(std::initializer_list<SparseSymMatrix::Entry> es) {
  SparseSymMatrix m;
  for (const auto& e : es) m.add(e.block, e.i, e.j, e.value);
  m.normalize();
  return m;
}

// The 4x4 instance with cost x1 + x2 whose constraints fix X12 = 1, X33 = 1,
// X44 = 0, X13 = -X24 and X14 = X23.
inline ConicProgram tied_example() {
  ConicProgram p;
  p.structure = BlockStructure({4});
  p.c = sparse({{0, 0, 0, 1.0}, {0, 1, 1, 1.0}});
  p.a = {sparse({{0, 0, 1, 0.5}}), sparse({{0, 2, 2, 1.0}}), sparse({{0, 3, 3, 1.0}}),
         sparse({{0, 0, 2, 0.5}, {0, 1, 3, 0.5}}), sparse({{0, 0, 3, 0.5}, {0, 1, 2, -0.5}})};
  p.b = {1, 1, 0, 0, 0};
  return p;
}

// Max |<B_i, B_j> - delta_ij|.
inline double orthonormality_defect(const SubspaceBasis& b) {
  if (b.dim() == 0) return 0.0;
  Eigen::MatrixXd g = b.matrix().transpose() * b.matrix();
  return (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

}  // namespace jred::testing
