#include "jred/subspace.hpp"

#include <algorithm>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "jred/random.hpp"

namespace jred {

namespace {

// Eigenvalues closer than this fraction of the spectral radius share an idempotent.
constexpr double kMergeGap = 1e-6;

// Adds the spectral idempotents of x for its nonzero eigenvalues. They lie in
// any Jordan algebra containing x and, unlike the powers of x, are well
// conditioned, so roundoff does not grow along the closure.
void add_idempotents(OrthoBuilder& s, const SymBlockMatrix& x, double tol) {
  const BlockStructure& st = x.structure();
  struct Eig {
    double value;
    int block;
    Index col;
  };
  std::vector<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>> es(st.num_blocks());
  std::vector<Eig> eigs;
  double top = 0;
  for (int k = 0; k < st.num_blocks(); ++k) {
    es[k].compute(x.block(k));
    for (Index a = 0; a < es[k].eigenvalues().size(); ++a) {
      eigs.push_back({es[k].eigenvalues()[a], k, a});
      top = std::max(top, std::abs(es[k].eigenvalues()[a]));
    }
  }
  if (top == 0.0) return;
  std::stable_sort(eigs.begin(), eigs.end(), [](const Eig& a, const Eig& b) { return a.value < b.value; });
  const double gap = kMergeGap * top;
  size_t lo = 0;
  while (lo < eigs.size()) {
    size_t hi = lo + 1;
    while (hi < eigs.size() && eigs[hi].value - eigs[hi - 1].value <= gap) ++hi;
    bool zero = false;
    for (size_t t = lo; t < hi; ++t) zero = zero || std::abs(eigs[t].value) <= gap;
    if (!zero) {
      SymBlockMatrix e(st);
      for (size_t t = lo; t < hi; ++t) {
        const auto v = es[eigs[t].block].eigenvectors().col(eigs[t].col);
        e.block(eigs[t].block) += v * v.transpose();
      }
      Eigen::VectorXd ev = svec(e);
      s.add(ev / ev.norm(), tol);
    }
    lo = hi;
  }
}

// Closes the builder under XY + YX, starting from column `done`.
void close_squares(OrthoBuilder& s, std::vector<SymBlockMatrix>& elems, int& done, double tol,
                   const BlockStructure& st) {
  while (done < s.dim()) {
    while (static_cast<int>(elems.size()) < s.dim()) elems.push_back(smat(st, s.column(static_cast<int>(elems.size()))));
    const int k = done;
    add_idempotents(s, elems[k], tol);
    for (int j = 0; j <= k; ++j) {
      // Basis elements have unit norm, so tol is already relative.
      s.add(svec(anticommutator(elems[j], elems[k])), tol);
    }
    ++done;
  }
}

}  // namespace

AdmissibilityReport check_admissible(const SubspaceBasis& s, const AffineData& aff, double tol,
                                     std::uint64_t seed) {
  AdmissibilityReport r;
  const BlockStructure& st = aff.structure;
  const SubspaceBasis S = s.structure() == st ? s : SubspaceBasis(st, Eigen::MatrixXd(st.dim(), 0));

  for (const SymBlockMatrix* v : {&aff.Y_Lperp, &aff.C_L}) {
    Eigen::VectorXd x = svec(*v);
    r.points_residual = std::max(r.points_residual, S.residual(x) / std::max(1.0, x.norm()));
  }
  r.contains_points = r.points_residual <= tol;

  for (int k = 0; k < S.dim(); ++k) {
    Eigen::VectorXd pl = aff.project_L(Eigen::VectorXd(S.matrix().col(k)));
    r.L_residual = std::max(r.L_residual, S.residual(pl));
  }
  r.L_invariant = r.L_residual <= tol;

  std::vector<SymBlockMatrix> elems = S.elements();
  if (S.dim() <= 64) {
    for (int i = 0; i < S.dim(); ++i)
      for (int j = i; j < S.dim(); ++j)
        r.square_residual = std::max(r.square_residual, S.residual(svec(jordan_product(elems[i], elems[j]))));
  } else {
    Rng rng(seed, 0x5a);
    for (int t = 0; t < 64; ++t) {
      Eigen::VectorXd g = rng.normal_vector(S.dim());
      g /= g.norm();
      SymBlockMatrix x = smat(st, S.matrix() * g);
      r.square_residual = std::max(r.square_residual, S.residual(svec(square(x))));
    }
  }
  r.square_closed = r.square_residual <= tol;
  return r;
}

SubspaceBasis optimal_admissible_subspace(const AffineData& aff, double tol, std::uint64_t /*seed*/,
                                          ClosureTrace* trace) {
  const BlockStructure& st = aff.structure;
  OrthoBuilder s(st);
  {
    Eigen::VectorXd c = svec(aff.C_L);
    Eigen::VectorXd y = svec(aff.Y_Lperp);
    const double ref = std::max(c.norm(), y.norm());
    s.add(c, tol * ref);
    s.add(y, tol * ref);
  }
  if (s.dim() == 0) {
    if (trace) trace->diagnostics.push_back("initial span is {0}; the reduced problem is trivial");
    return s.finish(tol);
  }

  std::vector<SymBlockMatrix> elems;
  int done_l = 0;
  int done_sq = 0;
  while (true) {
    const int before = s.dim();
    const int upto = s.dim();
    for (int k = done_l; k < upto; ++k) s.add(aff.project_L(Eigen::VectorXd(s.column(k))), tol);
    done_l = upto;
    close_squares(s, elems, done_sq, tol, st);
    if (trace) trace->dims.push_back(s.dim());
    if (s.dim() == before) break;
  }
  return s.finish(tol);
}

SubspaceBasis square_closure(const SubspaceBasis& start, double tol) {
  OrthoBuilder s(start);
  std::vector<SymBlockMatrix> elems;
  int done = 0;
  close_squares(s, elems, done, tol, start.structure());
  return s.finish(tol);
}

SymBlockMatrix unit_element(const SubspaceBasis& s, std::uint64_t seed, double tol) {
  const BlockStructure& st = s.structure();
  SymBlockMatrix e(st);
  if (s.dim() == 0) return e;
  Rng rng(seed, 0x11);
  SymBlockMatrix z = smat(st, s.matrix() * rng.normal_vector(s.dim()));
  std::vector<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>> es(st.num_blocks());
  double top = 0;
  for (int k = 0; k < st.num_blocks(); ++k) {
    es[k].compute(z.block(k));
    top = std::max(top, es[k].eigenvalues().cwiseAbs().maxCoeff());
  }
  const double cut = std::max(tol, 1e-8) * top;
  for (int k = 0; k < st.num_blocks(); ++k) {
    const auto& ev = es[k].eigenvalues();
    const auto& V = es[k].eigenvectors();
    for (Index a = 0; a < ev.size(); ++a)
      if (std::abs(ev[a]) > cut) e.block(k) += V.col(a) * V.col(a).transpose();
  }
  return e;
}

}  // namespace jred
