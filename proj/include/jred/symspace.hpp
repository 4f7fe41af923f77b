#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace jred {

using Index = Eigen::Index;

inline constexpr double kDefaultTol = 1e-9;

// Block orders (n_1, ..., n_r) of a product of symmetric matrix spaces.
class BlockStructure {
 public:
  struct Entry {
    int block;
    int i;
    int j;  // i <= j
  };

  BlockStructure() = default;
  explicit BlockStructure(std::vector<int> orders);

  const std::vector<int>& orders() const { return orders_; }
  int num_blocks() const { return static_cast<int>(orders_.size()); }
  int order(int k) const { return orders_[k]; }
  // Ambient dimension sum n_k (n_k + 1) / 2.
  Index dim() const { return offsets_.empty() ? 0 : offsets_.back(); }
  Index offset(int k) const { return offsets_[k]; }
  // Position of (i, j) of block k in svec coordinates. Order does not matter.
  Index svec_index(int k, int i, int j) const {
    if (i > j) std::swap(i, j);
    return offsets_[k] + static_cast<Index>(j) * (j + 1) / 2 + i;
  }
  Entry entry(Index pos) const;

  bool operator==(const BlockStructure& o) const { return orders_ == o.orders_; }
  bool operator!=(const BlockStructure& o) const { return !(*this == o); }

 private:
  std::vector<int> orders_;
  std::vector<Index> offsets_;
};

void require_same(const BlockStructure& a, const BlockStructure& b);

// Element of S^{n_1} x ... x S^{n_r}; blocks are stored as full dense
// symmetric matrices.
class SymBlockMatrix {
 public:
  SymBlockMatrix() = default;
  explicit SymBlockMatrix(const BlockStructure& s);

  static SymBlockMatrix zeros(const BlockStructure& s) { return SymBlockMatrix(s); }
  static SymBlockMatrix identity(const BlockStructure& s);

  const BlockStructure& structure() const { return structure_; }
  int num_blocks() const { return structure_.num_blocks(); }
  Eigen::MatrixXd& block(int k) { return blocks_[k]; }
  const Eigen::MatrixXd& block(int k) const { return blocks_[k]; }

  // Sets entries (i,j) and (j,i).
  void set(int k, int i, int j, double v) {
    blocks_[k](i, j) = v;
    blocks_[k](j, i) = v;
  }
  double get(int k, int i, int j) const { return blocks_[k](i, j); }

  double norm() const;
  double max_abs() const;
  // Symmetrizes every block in place.
  void symmetrize();

  SymBlockMatrix& operator+=(const SymBlockMatrix& o);
  SymBlockMatrix& operator-=(const SymBlockMatrix& o);
  SymBlockMatrix& operator*=(double a);
  friend SymBlockMatrix operator+(SymBlockMatrix a, const SymBlockMatrix& b) { return a += b; }
  friend SymBlockMatrix operator-(SymBlockMatrix a, const SymBlockMatrix& b) { return a -= b; }
  friend SymBlockMatrix operator*(double s, SymBlockMatrix a) { return a *= s; }
  friend SymBlockMatrix operator*(SymBlockMatrix a, double s) { return a *= s; }

 private:
  BlockStructure structure_;
  std::vector<Eigen::MatrixXd> blocks_;
};

// Isometric coordinates: off-diagonal entries carry a factor sqrt(2).
struct SvecCoords {
  BlockStructure structure;
  Eigen::VectorXd coords;
};

Eigen::VectorXd svec(const SymBlockMatrix& x);
SymBlockMatrix smat(const BlockStructure& s, const Eigen::VectorXd& v);

double inner(const SymBlockMatrix& x, const SymBlockMatrix& y);
SymBlockMatrix jordan_product(const SymBlockMatrix& x, const SymBlockMatrix& y);
SymBlockMatrix square(const SymBlockMatrix& x);
// XY + YX, blockwise.
SymBlockMatrix anticommutator(const SymBlockMatrix& x, const SymBlockMatrix& y);
// Smallest eigenvalue over all blocks.
double min_eigenvalue(const SymBlockMatrix& x);

// Orthonormal basis of a subspace, stored as svec columns.
class SubspaceBasis {
 public:
  SubspaceBasis() = default;
  SubspaceBasis(BlockStructure s, Eigen::MatrixXd q, double tol = kDefaultTol)
      : structure_(std::move(s)), q_(std::move(q)), tol_(tol) {}

  static SubspaceBasis ambient(const BlockStructure& s);

  const BlockStructure& structure() const { return structure_; }
  int dim() const { return static_cast<int>(q_.cols()); }
  double tol() const { return tol_; }
  const Eigen::MatrixXd& matrix() const { return q_; }
  SymBlockMatrix element(int k) const { return smat(structure_, q_.col(k)); }
  std::vector<SymBlockMatrix> elements() const;

  // Coordinates Q^T v.
  Eigen::VectorXd coordinates(const Eigen::VectorXd& v) const;
  Eigen::VectorXd project(const Eigen::VectorXd& v) const;
  SymBlockMatrix project(const SymBlockMatrix& x) const;
  // || v - P v ||.
  double residual(const Eigen::VectorXd& v) const;

 private:
  BlockStructure structure_;
  Eigen::MatrixXd q_;
  double tol_ = kDefaultTol;
};

// Incremental modified Gram-Schmidt with one re-orthogonalization pass.
class OrthoBuilder {
 public:
  explicit OrthoBuilder(BlockStructure s) : structure_(std::move(s)) {}
  OrthoBuilder(const SubspaceBasis& start);

  // Adds v unless its residual is at most `drop` in absolute terms.
  bool add(Eigen::VectorXd v, double drop);
  int dim() const { return static_cast<int>(cols_.size()); }
  const Eigen::VectorXd& column(int k) const { return cols_[k]; }
  double residual(Eigen::VectorXd v) const;
  SubspaceBasis finish(double tol = kDefaultTol) const;

 private:
  void sweep(Eigen::VectorXd& v) const;

  BlockStructure structure_;
  std::vector<Eigen::VectorXd> cols_;
};

SubspaceBasis orthonormalize(const std::vector<SymBlockMatrix>& vectors, double tol = kDefaultTol);
SubspaceBasis orthonormalize_svec(const BlockStructure& s, const std::vector<Eigen::VectorXd>& vectors,
                                  double tol = kDefaultTol);
SymBlockMatrix project_onto_span(const SubspaceBasis& basis, const SymBlockMatrix& x);

// Largest residual of the columns of `a` after projection onto `b`.
double containment_residual(const SubspaceBasis& a, const SubspaceBasis& b);

}  // namespace jred
