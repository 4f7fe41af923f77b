#include "jred/reduce.hpp"

#include <cmath>

#include "jred/error.hpp"
#include "jred/kernels.hpp"

namespace jred {

namespace {

// Reduced data entries below this fraction of the largest entry are dropped.
constexpr double kDataDrop = 1e-12;

// M^T svec(A) for a sparse A, touching only the rows of M in A's support.
Eigen::VectorXd transpose_times(const Eigen::MatrixXd& m, const BlockStructure& s, const SparseSymMatrix& a) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(m.cols());
  for (const auto& [pos, v] : a.svec_sparse(s)) out += v * m.row(pos).transpose();
  return out;
}

}  // namespace

std::string_view to_string(ReducedForm f) { return f == ReducedForm::kIsomorphic ? "isomorphic" : "restriction"; }

std::vector<int> independent_rows(const std::vector<Eigen::VectorXd>& rows, double tol) {
  double ref = 0;
  for (const auto& r : rows) ref = std::max(ref, r.norm());
  std::vector<int> kept;
  std::vector<Eigen::VectorXd> basis;
  for (size_t i = 0; i < rows.size(); ++i) {
    Eigen::VectorXd v = rows[i];
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) kernels::axpy(-kernels::dot(q.data(), v.data(), v.size()), q.data(), v.data(), v.size());
    const double n = v.norm();
    if (n <= tol * ref || n == 0.0) continue;
    basis.push_back(v / n);
    kept.push_back(static_cast<int>(i));
  }
  return kept;
}

ReducedProgram reformulate_restriction(const ConicProgram& program, const SubspaceBasis& s, double tol) {
  require_same(program.structure, s.structure());
  const Eigen::MatrixXd& q = s.matrix();
  ReducedProgram red;
  red.form = ReducedForm::kRestriction;
  red.original = program.structure;
  red.subspace = s;
  std::vector<Eigen::VectorXd> coords;
  coords.reserve(program.a.size());
  for (const auto& a : program.a) coords.push_back(transpose_times(q, program.structure, a));
  red.kept_constraints = independent_rows(coords, tol);

  ConicProgram& out = red.program;
  out.name = program.name;
  out.structure = program.structure;
  out.c = SparseSymMatrix::from_svec(program.structure, q * transpose_times(q, program.structure, program.c), kDataDrop);
  for (int i : red.kept_constraints) {
    out.a.push_back(SparseSymMatrix::from_svec(program.structure, q * coords[i], kDataDrop));
    out.b.push_back(program.b[i]);
  }
  return red;
}

ReducedProgram reformulate_coordinate(const ConicProgram& program, const SymRelation& r, double tol) {
  require_same(program.structure, r.structure());
  const BlockStructure& st = program.structure;
  auto mask = [&](const SparseSymMatrix& a) {
    SparseSymMatrix out;
    for (const auto& e : a.entries())
      if (r.contains(st.svec_index(e.block, e.i, e.j))) out.add(e.block, e.i, e.j, e.value);
    out.normalize();
    return out;
  };
  ConicProgram masked;
  masked.structure = st;
  masked.c = mask(program.c);
  for (const auto& a : program.a) masked.a.push_back(mask(a));
  masked.b = program.b;

  ReducedProgram red;
  red.form = ReducedForm::kRestriction;
  red.original = st;
  red.relation = r;
  red.kept_constraints = LperpProjector(masked, tol).kept_rows();
  ConicProgram& out = red.program;
  out.name = program.name;
  out.structure = st;
  out.c = masked.c;
  for (int i : red.kept_constraints) {
    out.a.push_back(masked.a[i]);
    out.b.push_back(program.b[i]);
  }
  return red;
}

std::optional<ReducedProgram> reformulate_isomorphic(const ConicProgram& program, IdealDecomposition& decomp,
                                                     std::uint64_t seed, double tol) {
  require_same(program.structure, decomp.subspace.structure());
  if (!decomp.phi) {
    if (!construct_isomorphism(decomp, seed, tol)) return std::nullopt;
  }
  const JordanMap& map = *decomp.phi;
  ReducedProgram red;
  red.form = ReducedForm::kIsomorphic;
  red.original = program.structure;
  red.subspace = decomp.subspace;
  red.phi = map.phi;
  red.gram_inverse = map.gram_diag.cwiseInverse();

  std::vector<Eigen::VectorXd> coords;
  coords.reserve(program.a.size());
  for (const auto& a : program.a) coords.push_back(transpose_times(map.phi, program.structure, a));
  red.kept_constraints = independent_rows(coords, tol);

  ConicProgram& out = red.program;
  out.name = program.name;
  out.structure = map.reduced;
  out.c = SparseSymMatrix::from_svec(map.reduced, transpose_times(map.phi, program.structure, program.c), kDataDrop);
  for (int i : red.kept_constraints) {
    out.a.push_back(SparseSymMatrix::from_svec(map.reduced, coords[i], kDataDrop));
    out.b.push_back(program.b[i]);
  }
  return red;
}

SymBlockMatrix project_subspace(const ReducedProgram& red, const SymBlockMatrix& x) {
  require_same(red.original, x.structure());
  if (red.relation) {
    SymBlockMatrix out(red.original);
    const BlockStructure& st = red.original;
    for (int k = 0; k < st.num_blocks(); ++k)
      for (int j = 0; j < st.order(k); ++j)
        for (int i = 0; i <= j; ++i)
          if (red.relation->contains(st.svec_index(k, i, j))) out.set(k, i, j, x.get(k, i, j));
    return out;
  }
  return red.subspace.project(x);
}

SymBlockMatrix lift_primal(const ReducedProgram& red, const SymBlockMatrix& xhat) {
  require_same(red.program.structure, xhat.structure());
  if (red.form == ReducedForm::kRestriction) return project_subspace(red, xhat);
  return smat(red.original, red.phi * svec(xhat));
}

SymBlockMatrix lift_dual(const ReducedProgram& red, const SymBlockMatrix& shat) {
  require_same(red.program.structure, shat.structure());
  if (red.form == ReducedForm::kRestriction) return project_subspace(red, shat);
  return smat(red.original, red.phi * svec(shat).cwiseProduct(red.gram_inverse));
}

}  // namespace jred
