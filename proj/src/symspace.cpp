#include "jred/symspace.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jred/error.hpp"
#include "jred/kernels.hpp"

namespace jred {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488;
}

BlockStructure::BlockStructure(std::vector<int> orders) : orders_(std::move(orders)) {
  offsets_.reserve(orders_.size() + 1);
  offsets_.push_back(0);
  for (int n : orders_) {
    if (n < 1) throw StructureError("block order must be positive, got " + std::to_string(n));
    offsets_.push_back(offsets_.back() + static_cast<Index>(n) * (n + 1) / 2);
  }
}

BlockStructure::Entry BlockStructure::entry(Index pos) const {
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), pos);
  int k = static_cast<int>(it - offsets_.begin()) - 1;
  Index local = pos - offsets_[k];
  auto j = static_cast<Index>((std::sqrt(8.0 * static_cast<double>(local) + 1.0) - 1.0) / 2.0);
  while (j * (j + 1) / 2 > local) --j;
  while ((j + 1) * (j + 2) / 2 <= local) ++j;
  return {k, static_cast<int>(local - j * (j + 1) / 2), static_cast<int>(j)};
}

void require_same(const BlockStructure& a, const BlockStructure& b) {
  if (a != b) throw StructureError("block structures differ");
}

SymBlockMatrix::SymBlockMatrix(const BlockStructure& s) : structure_(s) {
  blocks_.reserve(s.num_blocks());
  for (int n : s.orders()) blocks_.push_back(Eigen::MatrixXd::Zero(n, n));
}

SymBlockMatrix SymBlockMatrix::identity(const BlockStructure& s) {
  SymBlockMatrix x(s);
  for (auto& b : x.blocks_) b.setIdentity();
  return x;
}

double SymBlockMatrix::norm() const {
  double s = 0;
  for (const auto& b : blocks_) s += b.squaredNorm();
  return std::sqrt(s);
}

double SymBlockMatrix::max_abs() const {
  double m = 0;
  for (const auto& b : blocks_) m = std::max(m, b.cwiseAbs().maxCoeff());
  return m;
}

void SymBlockMatrix::symmetrize() {
  for (auto& b : blocks_) {
    Eigen::MatrixXd t = 0.5 * (b + b.transpose());
    b = std::move(t);
  }
}

SymBlockMatrix& SymBlockMatrix::operator+=(const SymBlockMatrix& o) {
  require_same(structure_, o.structure_);
  for (size_t k = 0; k < blocks_.size(); ++k) blocks_[k] += o.blocks_[k];
  return *this;
}

SymBlockMatrix& SymBlockMatrix::operator-=(const SymBlockMatrix& o) {
  require_same(structure_, o.structure_);
  for (size_t k = 0; k < blocks_.size(); ++k) blocks_[k] -= o.blocks_[k];
  return *this;
}

SymBlockMatrix& SymBlockMatrix::operator*=(double a) {
  for (auto& b : blocks_) b *= a;
  return *this;
}

Eigen::VectorXd svec(const SymBlockMatrix& x) {
  const BlockStructure& s = x.structure();
  Eigen::VectorXd v(s.dim());
  Index p = 0;
  for (int k = 0; k < s.num_blocks(); ++k) {
    const auto& b = x.block(k);
    for (int j = 0; j < s.order(k); ++j) {
      for (int i = 0; i < j; ++i) v[p++] = kSqrt2 * 0.5 * (b(i, j) + b(j, i));
      v[p++] = b(j, j);
    }
  }
  return v;
}

SymBlockMatrix smat(const BlockStructure& s, const Eigen::VectorXd& v) {
  if (v.size() != s.dim()) throw StructureError("svec length does not match structure");
  SymBlockMatrix x(s);
  Index p = 0;
  for (int k = 0; k < s.num_blocks(); ++k) {
    auto& b = x.block(k);
    for (int j = 0; j < s.order(k); ++j) {
      for (int i = 0; i < j; ++i) {
        double e = v[p++] / kSqrt2;
        b(i, j) = e;
        b(j, i) = e;
      }
      b(j, j) = v[p++];
    }
  }
  return x;
}

double inner(const SymBlockMatrix& x, const SymBlockMatrix& y) {
  require_same(x.structure(), y.structure());
  double s = 0;
  for (int k = 0; k < x.num_blocks(); ++k) s += x.block(k).cwiseProduct(y.block(k)).sum();
  return s;
}

SymBlockMatrix anticommutator(const SymBlockMatrix& x, const SymBlockMatrix& y) {
  require_same(x.structure(), y.structure());
  SymBlockMatrix r(x.structure());
  for (int k = 0; k < x.num_blocks(); ++k) {
    Eigen::MatrixXd p = x.block(k) * y.block(k);
    r.block(k) = p + p.transpose();
  }
  return r;
}

SymBlockMatrix jordan_product(const SymBlockMatrix& x, const SymBlockMatrix& y) {
  SymBlockMatrix r = anticommutator(x, y);
  r *= 0.5;
  return r;
}

SymBlockMatrix square(const SymBlockMatrix& x) {
  SymBlockMatrix r(x.structure());
  for (int k = 0; k < x.num_blocks(); ++k) {
    Eigen::MatrixXd p = x.block(k) * x.block(k);
    r.block(k) = 0.5 * (p + p.transpose());
  }
  return r;
}

double min_eigenvalue(const SymBlockMatrix& x) {
  double m = std::numeric_limits<double>::infinity();
  for (int k = 0; k < x.num_blocks(); ++k) {
    const auto& b = x.block(k);
    if (b.rows() == 1) {
      m = std::min(m, b(0, 0));
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b, Eigen::EigenvaluesOnly);
    m = std::min(m, es.eigenvalues()[0]);
  }
  return m;
}

SubspaceBasis SubspaceBasis::ambient(const BlockStructure& s) {
  return SubspaceBasis(s, Eigen::MatrixXd::Identity(s.dim(), s.dim()));
}

std::vector<SymBlockMatrix> SubspaceBasis::elements() const {
  std::vector<SymBlockMatrix> out;
  out.reserve(dim());
  for (int k = 0; k < dim(); ++k) out.push_back(element(k));
  return out;
}

Eigen::VectorXd SubspaceBasis::coordinates(const Eigen::VectorXd& v) const {
  if (v.size() != structure_.dim()) throw StructureError("vector length does not match subspace");
  Eigen::VectorXd c(dim());
  const auto n = static_cast<std::size_t>(q_.rows());
  for (int k = 0; k < dim(); ++k) c[k] = kernels::dot(q_.col(k).data(), v.data(), n);
  return c;
}

Eigen::VectorXd SubspaceBasis::project(const Eigen::VectorXd& v) const {
  Eigen::VectorXd c = coordinates(v);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
  const auto n = static_cast<std::size_t>(q_.rows());
  for (int k = 0; k < dim(); ++k) kernels::axpy(c[k], q_.col(k).data(), out.data(), n);
  return out;
}

SymBlockMatrix SubspaceBasis::project(const SymBlockMatrix& x) const {
  require_same(structure_, x.structure());
  return smat(structure_, project(svec(x)));
}

double SubspaceBasis::residual(const Eigen::VectorXd& v) const { return (v - project(v)).norm(); }

OrthoBuilder::OrthoBuilder(const SubspaceBasis& start) : structure_(start.structure()) {
  cols_.reserve(start.dim());
  for (int k = 0; k < start.dim(); ++k) cols_.emplace_back(start.matrix().col(k));
}

void OrthoBuilder::sweep(Eigen::VectorXd& v) const {
  const auto n = static_cast<std::size_t>(v.size());
  for (const auto& q : cols_) {
    double c = kernels::dot(q.data(), v.data(), n);
    kernels::axpy(-c, q.data(), v.data(), n);
  }
}

bool OrthoBuilder::add(Eigen::VectorXd v, double drop) {
  if (v.size() != structure_.dim()) throw StructureError("vector length does not match structure");
  sweep(v);
  sweep(v);
  const auto n = static_cast<std::size_t>(v.size());
  double r = std::sqrt(kernels::sumsq(v.data(), n));
  if (!(r > drop) || r == 0.0) return false;
  kernels::scale(1.0 / r, v.data(), n);
  cols_.push_back(std::move(v));
  return true;
}

double OrthoBuilder::residual(Eigen::VectorXd v) const {
  sweep(v);
  sweep(v);
  return v.norm();
}

SubspaceBasis OrthoBuilder::finish(double tol) const {
  Eigen::MatrixXd q(structure_.dim(), dim());
  for (int k = 0; k < dim(); ++k) q.col(k) = cols_[k];
  return SubspaceBasis(structure_, std::move(q), tol);
}

SubspaceBasis orthonormalize_svec(const BlockStructure& s, const std::vector<Eigen::VectorXd>& vectors,
                                  double tol) {
  double ref = 0;
  for (const auto& v : vectors) ref = std::max(ref, v.norm());
  OrthoBuilder b(s);
  for (const auto& v : vectors) b.add(v, tol * ref);
  return b.finish(tol);
}

SubspaceBasis orthonormalize(const std::vector<SymBlockMatrix>& vectors, double tol) {
  if (vectors.empty()) return SubspaceBasis();
  const BlockStructure& s = vectors.front().structure();
  std::vector<Eigen::VectorXd> v;
  v.reserve(vectors.size());
  for (const auto& x : vectors) {
    require_same(s, x.structure());
    v.push_back(svec(x));
  }
  return orthonormalize_svec(s, v, tol);
}

SymBlockMatrix project_onto_span(const SubspaceBasis& basis, const SymBlockMatrix& x) {
  return basis.project(x);
}

double containment_residual(const SubspaceBasis& a, const SubspaceBasis& b) {
  require_same(a.structure(), b.structure());
  double r = 0;
  for (int k = 0; k < a.dim(); ++k) r = std::max(r, b.residual(a.matrix().col(k)));
  return r;
}

}  // namespace jred
