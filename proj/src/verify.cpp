#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "jred/error.hpp"
#include "jred/random.hpp"
#include "jred/reduce.hpp"

namespace jred {

namespace {

constexpr double kMapTol = 1e-7;
constexpr double kSampleTol = 1e-7;

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

std::string fmt(const std::string& what, double v) {
  std::ostringstream os;
  os << what << " (" << v << ")";
  return os.str();
}

// Eigenvalues clipped below at `floor`, blockwise.
SymBlockMatrix clip(const SymBlockMatrix& x, double floor) {
  SymBlockMatrix out(x.structure());
  for (int k = 0; k < x.num_blocks(); ++k) {
    if (x.block(k).rows() == 0) continue;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x.block(k));
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(floor);
    out.block(k) = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  }
  out.symmetrize();
  return out;
}

// Alternating projections between an affine set and the shifted cone
// {lambda >= delta}. Returns a point of the affine set with min eigenvalue
// above a small positive margin, or nullopt.
template <typename AffineProj>
std::optional<SymBlockMatrix> find_interior(const BlockStructure& s, const AffineProj& onto_affine) {
  SymBlockMatrix x = onto_affine(SymBlockMatrix::identity(s));
  for (int it = 0; it < 400; ++it) {
    const double scale = std::max(1.0, x.norm());
    if (min_eigenvalue(x) > 1e-7 * scale) return x;
    x = onto_affine(clip(x, 1e-3 * scale / std::sqrt(static_cast<double>(s.dim()))));
  }
  return std::nullopt;
}

// base + eps * dir with eps shrunk until the result stays psd.
SymBlockMatrix perturb_in_cone(const SymBlockMatrix& base, const SymBlockMatrix& dir) {
  const double dn = dir.norm();
  // Directions at rounding level mean the affine set is a single point.
  if (dn <= 1e-12 * std::max(1.0, base.norm())) return base;
  double eps = std::max(min_eigenvalue(base), 0.0) / dn;
  for (int t = 0; t < 60 && eps > 0; ++t) {
    SymBlockMatrix x = base + eps * dir;
    if (min_eigenvalue(x) >= 0.0) return x;
    eps *= 0.5;
  }
  return base;
}

double cone_violation(const SymBlockMatrix& x) {
  return std::max(0.0, -min_eigenvalue(x)) / std::max(1.0, x.norm());
}

// max |<A_i, X> - b_i| relative, plus membership of the slack in C + L-perp.
double dual_affine_residual(const AffineData& aff, const SymBlockMatrix& s) {
  SymBlockMatrix d = aff.project_L(s) - aff.C_L;
  return d.norm() / std::max(1.0, s.norm());
}

// Dual objective of a slack S = C - sum y_i A_i: <C - S, Y> for any Y with
// <A_i, Y> = b_i.
double dual_objective(const AffineData& aff, const SymBlockMatrix& s) { return inner(aff.C - s, aff.Y_Lperp); }

}  // namespace

VerificationReport verify_reduction(const ConicProgram& program, const ReducedProgram& red, int samples,
                                    std::uint64_t seed, const std::optional<VerificationHint>& hint) {
  VerificationReport rep;
  const BlockStructure& st = program.structure;
  AffineData aff = build_affine_data(program);
  Rng rng(seed, 0x90);

  // Admissibility.
  if (red.relation) {
    // Randomized checks on the coordinate subspace.
    auto in_s = [&](const SymBlockMatrix& x) { return (x - project_subspace(red, x)).norm() / std::max(1.0, x.norm()); };
    double worst = std::max(in_s(aff.C_L), in_s(aff.Y_Lperp));
    for (int t = 0; t < 8; ++t) {
      SymBlockMatrix r = project_subspace(red, smat(st, rng.normal_vector(st.dim())));
      worst = std::max(worst, in_s(aff.project_L(r)));
      worst = std::max(worst, in_s(square(r)));
    }
    rep.admissible = worst <= 1e-8;
  } else {
    rep.admissible = check_admissible(red.subspace, aff, 1e-8, seed).all();
  }
  if (!rep.admissible) rep.failures.push_back("subspace is not admissible");

  // Transport map.
  if (red.form == ReducedForm::kIsomorphic) {
    const BlockStructure& rs = red.program.structure;
    Eigen::MatrixXd g = red.phi.transpose() * red.phi;
    Eigen::MatrixXd want = red.gram_inverse.cwiseInverse().asDiagonal();
    rep.map_gram_residual = (g - want).cwiseAbs().maxCoeff() / std::max(1.0, want.cwiseAbs().maxCoeff());
    for (Index c = 0; c < red.phi.cols(); ++c)
      rep.map_range_residual =
          std::max(rep.map_range_residual, red.subspace.residual(red.phi.col(c)) / std::max(1.0, red.phi.col(c).norm()));
    for (int t = 0; t < 10; ++t) {
      SymBlockMatrix u = smat(rs, rng.normal_vector(rs.dim()));
      SymBlockMatrix v = smat(rs, rng.normal_vector(rs.dim()));
      SymBlockMatrix lhs = lift_primal(red, jordan_product(u, v));
      SymBlockMatrix rhs = jordan_product(lift_primal(red, u), lift_primal(red, v));
      rep.homomorphism_residual = std::max(rep.homomorphism_residual, (lhs - rhs).norm() / std::max(1.0, lhs.norm()));
    }
    if (rep.map_gram_residual > kMapTol) rep.failures.push_back(fmt("map Gram matrix is not diagonal", rep.map_gram_residual));
    if (rep.map_range_residual > kMapTol) rep.failures.push_back(fmt("map leaves the subspace", rep.map_range_residual));
    if (rep.homomorphism_residual > kMapTol)
      rep.failures.push_back(fmt("map is not a Jordan homomorphism", rep.homomorphism_residual));
  }
  if (samples <= 0) return rep;

  const ConicProgram& rp = red.program;
  AffineData raff = build_affine_data(rp);
  auto preimage = [&](const SymBlockMatrix& x) {
    if (red.form == ReducedForm::kRestriction) return x;
    return smat(rp.structure, (red.phi.transpose() * svec(x)).cwiseProduct(red.gram_inverse));
  };
  auto adjoint = [&](const SymBlockMatrix& x) {
    if (red.form == ReducedForm::kRestriction) return x;
    return smat(rp.structure, red.phi.transpose() * svec(x));
  };
  auto note = [&](double& slot, double v) { slot = std::max(slot, v); };

  // Primal direction.
  std::optional<SymBlockMatrix> x0;
  if (hint && hint->x0.structure() == st) x0 = hint->x0;
  if (!x0) x0 = find_interior(st, [&](const SymBlockMatrix& x) { return aff.project_L(x) + aff.Y_Lperp; });
  if (x0) {
    for (int t = 0; t < samples; ++t) {
      SymBlockMatrix x = perturb_in_cone(*x0, aff.project_L(smat(st, rng.normal_vector(st.dim()))));
      const double obj = program.objective(x);
      SymBlockMatrix px = project_subspace(red, x);
      note(rep.primal_affine_residual, program.affine_residual(px));
      note(rep.primal_objective_gap, rel(obj, program.objective(px)));
      note(rep.primal_cone_violation, cone_violation(px));
      SymBlockMatrix xhat = preimage(px);
      note(rep.primal_affine_residual, rp.affine_residual(xhat));
      note(rep.primal_objective_gap, rel(obj, rp.objective(xhat)));
      note(rep.primal_cone_violation, cone_violation(xhat));
      // Reduced feasible points lift to feasible points.
      SymBlockMatrix xr =
          perturb_in_cone(xhat, raff.project_L(smat(rp.structure, rng.normal_vector(rp.structure.dim()))));
      SymBlockMatrix lifted = lift_primal(red, xr);
      note(rep.primal_affine_residual, program.affine_residual(lifted));
      note(rep.primal_objective_gap, rel(rp.objective(xr), program.objective(lifted)));
      note(rep.primal_cone_violation, cone_violation(lifted));
      ++rep.primal_samples;
    }
  }

  // Dual direction.
  std::optional<SymBlockMatrix> s0;
  if (hint && hint->s0.structure() == st) s0 = hint->s0;
  if (!s0) s0 = find_interior(st, [&](const SymBlockMatrix& s) { return aff.project_Lperp(s) + aff.C_L; });
  if (s0) {
    for (int t = 0; t < samples; ++t) {
      SymBlockMatrix s = perturb_in_cone(*s0, aff.project_Lperp(smat(st, rng.normal_vector(st.dim()))));
      const double obj = dual_objective(aff, s);
      SymBlockMatrix ps = project_subspace(red, s);
      note(rep.dual_affine_residual, dual_affine_residual(aff, ps));
      note(rep.dual_objective_gap, rel(obj, dual_objective(aff, ps)));
      note(rep.dual_cone_violation, cone_violation(ps));
      SymBlockMatrix shat = adjoint(ps);
      note(rep.dual_affine_residual, dual_affine_residual(raff, shat));
      note(rep.dual_objective_gap, rel(obj, dual_objective(raff, shat)));
      note(rep.dual_cone_violation, cone_violation(shat));
      SymBlockMatrix sr =
          perturb_in_cone(shat, raff.project_Lperp(smat(rp.structure, rng.normal_vector(rp.structure.dim()))));
      SymBlockMatrix lifted = lift_dual(red, sr);
      note(rep.dual_affine_residual, dual_affine_residual(aff, lifted));
      note(rep.dual_objective_gap, rel(dual_objective(raff, sr), dual_objective(aff, lifted)));
      note(rep.dual_cone_violation, cone_violation(lifted));
      ++rep.dual_samples;
    }
  }

  if (rep.primal_affine_residual > kSampleTol)
    rep.failures.push_back(fmt("primal points violate the constraints", rep.primal_affine_residual));
  if (rep.primal_objective_gap > kSampleTol)
    rep.failures.push_back(fmt("primal objective not preserved", rep.primal_objective_gap));
  if (rep.primal_cone_violation > kSampleTol)
    rep.failures.push_back(fmt("primal points leave the cone", rep.primal_cone_violation));
  if (rep.dual_affine_residual > kSampleTol)
    rep.failures.push_back(fmt("dual points violate the constraints", rep.dual_affine_residual));
  if (rep.dual_objective_gap > kSampleTol)
    rep.failures.push_back(fmt("dual objective not preserved", rep.dual_objective_gap));
  if (rep.dual_cone_violation > kSampleTol)
    rep.failures.push_back(fmt("dual points leave the cone", rep.dual_cone_violation));
  return rep;
}

}  // namespace jred
