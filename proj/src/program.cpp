#include "jred/program.hpp"

#include <algorithm>
#include <cmath>

#include "jred/error.hpp"

namespace jred {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488;
}

void SparseSymMatrix::add(int k, int i, int j, double v) {
  if (i > j) std::swap(i, j);
  entries_.push_back({k, i, j, v});
}

void SparseSymMatrix::normalize() {
  std::sort(entries_.begin(), entries_.end(), [](const Entry& x, const Entry& y) {
    if (x.block != y.block) return x.block < y.block;
    if (x.i != y.i) return x.i < y.i;
    return x.j < y.j;
  });
  std::vector<Entry> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) {
    if (!out.empty() && out.back().block == e.block && out.back().i == e.i && out.back().j == e.j)
      out.back().value += e.value;
    else
      out.push_back(e);
  }
  std::erase_if(out, [](const Entry& e) { return e.value == 0.0; });
  entries_ = std::move(out);
}

long SparseSymMatrix::nnz_full() const {
  long n = 0;
  for (const auto& e : entries_)
    if (e.value != 0.0) n += (e.i == e.j) ? 1 : 2;
  return n;
}

SymBlockMatrix SparseSymMatrix::dense(const BlockStructure& s) const {
  SymBlockMatrix x(s);
  for (const auto& e : entries_) x.set(e.block, e.i, e.j, x.get(e.block, e.i, e.j) + e.value);
  return x;
}

Eigen::VectorXd SparseSymMatrix::svec(const BlockStructure& s) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(s.dim());
  for (const auto& [p, x] : svec_sparse(s)) v[p] += x;
  return v;
}

std::vector<std::pair<Index, double>> SparseSymMatrix::svec_sparse(const BlockStructure& s) const {
  std::vector<std::pair<Index, double>> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) {
    if (e.block < 0 || e.block >= s.num_blocks() || e.i < 0 || e.j >= s.order(e.block))
      throw StructureError("sparse entry outside block structure");
    out.emplace_back(s.svec_index(e.block, e.i, e.j), e.i == e.j ? e.value : kSqrt2 * e.value);
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<std::pair<Index, double>> merged;
  for (const auto& pv : out) {
    if (!merged.empty() && merged.back().first == pv.first)
      merged.back().second += pv.second;
    else
      merged.push_back(pv);
  }
  return merged;
}

double SparseSymMatrix::inner(const SymBlockMatrix& x) const {
  double s = 0;
  for (const auto& e : entries_) s += (e.i == e.j ? 1.0 : 2.0) * e.value * x.get(e.block, e.i, e.j);
  return s;
}

double SparseSymMatrix::inner_svec(const BlockStructure& s, const Eigen::VectorXd& v) const {
  double r = 0;
  for (const auto& e : entries_) {
    Index p = s.svec_index(e.block, e.i, e.j);
    r += (e.i == e.j ? 1.0 : kSqrt2) * e.value * v[p];
  }
  return r;
}

SparseSymMatrix SparseSymMatrix::from_dense(const SymBlockMatrix& x, double drop) {
  SparseSymMatrix m;
  double cut = drop * x.max_abs();
  for (int k = 0; k < x.num_blocks(); ++k) {
    const auto& b = x.block(k);
    for (int i = 0; i < b.rows(); ++i)
      for (int j = i; j < b.cols(); ++j)
        if (b(i, j) != 0.0 && std::abs(b(i, j)) > cut) m.entries_.push_back({k, i, j, b(i, j)});
  }
  return m;
}

SparseSymMatrix SparseSymMatrix::from_svec(const BlockStructure& s, const Eigen::VectorXd& v, double drop) {
  SparseSymMatrix m;
  double cut = drop * (v.size() ? v.cwiseAbs().maxCoeff() : 0.0);
  for (Index p = 0; p < v.size(); ++p) {
    if (v[p] == 0.0 || std::abs(v[p]) <= cut) continue;
    auto e = s.entry(p);
    m.entries_.push_back({e.block, e.i, e.j, e.i == e.j ? v[p] : v[p] / kSqrt2});
  }
  m.normalize();
  return m;
}

long ConicProgram::nnz() const {
  long n = 0;
  for (const auto& m : a) n += m.nnz_full();
  return n;
}

double ConicProgram::affine_residual(const SymBlockMatrix& x) const {
  double r = 0;
  for (int i = 0; i < num_constraints(); ++i)
    r = std::max(r, std::abs(a[i].inner(x) - b[i]) / std::max(1.0, std::abs(b[i])));
  return r;
}

void ConicProgram::validate() const {
  if (a.size() != b.size()) throw StructureError("constraint count and right-hand side length differ");
  auto check = [&](const SparseSymMatrix& m) {
    for (const auto& e : m.entries())
      if (e.block < 0 || e.block >= structure.num_blocks() || e.i < 0 || e.i > e.j ||
          e.j >= structure.order(e.block))
        throw StructureError("entry outside block structure");
  };
  check(c);
  for (const auto& m : a) check(m);
}

}  // namespace jred
