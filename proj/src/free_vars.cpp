#include "jred/free_vars.hpp"

#include <Eigen/QR>
#include <cmath>

#include "jred/error.hpp"

namespace jred {

namespace {

// sum_r w_r A_{rows[r]} as a sparse matrix.
SparseSymMatrix combine(const ConicProgram& p, const std::vector<int>& rows, const Eigen::VectorXd& w) {
  SparseSymMatrix out;
  for (size_t r = 0; r < rows.size(); ++r) {
    if (w[static_cast<Index>(r)] == 0.0) continue;
    for (const auto& e : p.a[rows[r]].entries()) out.add(e.block, e.i, e.j, w[static_cast<Index>(r)] * e.value);
  }
  out.normalize();
  return out;
}

double max_abs(const SparseSymMatrix& m) {
  double v = 0;
  for (const auto& e : m.entries()) v = std::max(v, std::abs(e.value));
  return v;
}

}  // namespace

Eigen::VectorXd FreeElimination::back_substitute(const SymBlockMatrix& x) const {
  Eigen::VectorXd resid(static_cast<Index>(rows.size()));
  for (size_t r = 0; r < rows.size(); ++r) resid[static_cast<Index>(r)] = original.b[rows[r]] - original.a[rows[r]].inner(x);
  return recover * resid;
}

FreeElimination eliminate_free_variables(const MixedProgram& mixed, double tol) {
  const ConicProgram& p = mixed.cone;
  p.validate();
  const Index m = p.num_constraints();
  const Index nf = mixed.free_columns.cols();
  if (nf > 0 && mixed.free_columns.rows() != m) throw StructureError("free columns do not match the constraints");
  if (mixed.free_cost.size() != nf) throw StructureError("free cost length differs from the free columns");

  FreeElimination out;
  out.original = p;
  out.program.name = p.name;
  out.program.structure = p.structure;
  out.program.c = p.c;
  out.recover = Eigen::MatrixXd::Zero(nf, 0);

  std::vector<int> untouched;
  for (Index i = 0; i < m; ++i) {
    if (nf > 0 && mixed.free_columns.row(i).cwiseAbs().maxCoeff() > 0.0)
      out.rows.push_back(static_cast<int>(i));
    else
      untouched.push_back(static_cast<int>(i));
  }
  if (out.rows.empty()) {
    if (nf > 0 && mixed.free_cost.cwiseAbs().maxCoeff() > 0.0)
      throw DomainError("objective is unbounded along the free variables");
    out.program.a = p.a;
    out.program.b = p.b;
    out.recover = Eigen::MatrixXd::Zero(nf, 0);
    return out;
  }

  const Index ms = static_cast<Index>(out.rows.size());
  Eigen::MatrixXd f(ms, nf);
  Eigen::VectorXd bs(ms);
  for (Index r = 0; r < ms; ++r) {
    f.row(r) = mixed.free_columns.row(out.rows[r]);
    bs[r] = p.b[out.rows[r]];
  }
  // F P = Q [R11 R12; 0 0] with R11 r x r.
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(f);
  qr.setThreshold(tol);
  const Index rank = qr.rank();
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(ms, ms);
  Eigen::MatrixXd rmat = qr.matrixR().topRows(rank).template triangularView<Eigen::Upper>();
  Eigen::MatrixXd r11 = rmat.leftCols(rank);
  Eigen::MatrixXd r12 = rmat.rightCols(nf - rank);
  Eigen::VectorXd g = qr.colsPermutation().transpose() * mixed.free_cost;
  Eigen::VectorXd g1 = g.head(rank), g2 = g.tail(nf - rank);

  // Objective along the free variables: g1^T w1 + g2^T w2 with
  // w1 = R11^{-1} (Q1^T (b - A(X)) - R12 w2).
  Eigen::VectorXd h1 = r11.transpose().triangularView<Eigen::Lower>().solve(g1);
  Eigen::VectorXd h = g2 - r12.transpose() * h1;
  if (h.size() > 0 && h.norm() > tol * std::max(1.0, g.norm()))
    throw DomainError("objective is unbounded along the free variables");
  Eigen::VectorXd u = q.leftCols(rank) * h1;  // objective = u^T (b - A(X))
  out.objective_offset = u.dot(bs);
  if (u.size() > 0) {
    SparseSymMatrix shift = combine(p, out.rows, u);
    for (const auto& e : shift.entries()) out.program.c.add(e.block, e.i, e.j, -e.value);
    out.program.c.normalize();
  }

  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(nf, ms);
  w.topRows(rank) = r11.triangularView<Eigen::Upper>().solve(q.leftCols(rank).transpose());
  out.recover = qr.colsPermutation() * w;

  // Untouched constraints first, then the combinations Q2^T (A(X) - b) = 0.
  double ref = 0;
  for (int i : out.rows) ref = std::max(ref, max_abs(p.a[i]));
  for (int i : untouched) {
    out.program.a.push_back(p.a[i]);
    out.program.b.push_back(p.b[i]);
  }
  for (Index k = rank; k < ms; ++k) {
    Eigen::VectorXd col = q.col(k);
    SparseSymMatrix a = combine(p, out.rows, col);
    const double bk = col.dot(bs);
    if (max_abs(a) <= tol * std::max(1.0, ref)) {
      if (std::abs(bk) > std::sqrt(tol) * std::max(1.0, bs.cwiseAbs().maxCoeff()))
        throw InfeasibleAffineError("free variables leave inconsistent equations");
      continue;
    }
    out.program.a.push_back(std::move(a));
    out.program.b.push_back(bk);
  }
  return out;
}

}  // namespace jred
