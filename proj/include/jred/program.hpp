#pragma once

#include <string>
#include <utility>
#include <vector>

#include "jred/symspace.hpp"

namespace jred {

// Sparse symmetric block matrix holding the upper triangle (i <= j).
class SparseSymMatrix {
 public:
  struct Entry {
    int block;
    int i;
    int j;
    double value;
  };

  SparseSymMatrix() = default;

  // Adds v at (i, j) of block k; the transposed position is implied.
  void add(int k, int i, int j, double v);
  // Sorts by (block, i, j), sums duplicates and removes exact zeros.
  void normalize();

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  // Nonzeros in full symmetric storage (off-diagonal entries count twice).
  long nnz_full() const;

  SymBlockMatrix dense(const BlockStructure& s) const;
  Eigen::VectorXd svec(const BlockStructure& s) const;
  // (svec position, svec value) pairs sorted by position.
  std::vector<std::pair<Index, double>> svec_sparse(const BlockStructure& s) const;
  double inner(const SymBlockMatrix& x) const;
  double inner_svec(const BlockStructure& s, const Eigen::VectorXd& v) const;

  // Keeps entries with |value| > drop * max|x|.
  static SparseSymMatrix from_dense(const SymBlockMatrix& x, double drop = 0.0);
  static SparseSymMatrix from_svec(const BlockStructure& s, const Eigen::VectorXd& v, double drop = 0.0);

 private:
  std::vector<Entry> entries_;
};

// minimize <C, X>  subject to  <A_i, X> = b_i,  X in the product psd cone.
struct ConicProgram {
  std::string name;
  BlockStructure structure;
  SparseSymMatrix c;
  std::vector<SparseSymMatrix> a;
  std::vector<double> b;

  int num_constraints() const { return static_cast<int>(a.size()); }
  // Full-storage nonzeros of the constraint matrices.
  long nnz() const;
  long cost_nnz() const { return c.nnz_full(); }
  double objective(const SymBlockMatrix& x) const { return c.inner(x); }
  // Largest |<A_i, X> - b_i| / max(1, |b_i|).
  double affine_residual(const SymBlockMatrix& x) const;
  void validate() const;
};

}  // namespace jred
