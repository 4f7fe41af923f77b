#include <gtest/gtest.h>

#include <cmath>

#include "jred/error.hpp"
#include "jred/subspace.hpp"
#include "test_util.hpp"

using namespace jred;
using jred::testing::orthonormality_defect;
using jred::testing::random_psd;
using jred::testing::random_sym;
using jred::testing::sparse;
using jred::testing::tied_example;
using jred::testing::unit_matrix;

namespace {

ConicProgram random_program(const BlockStructure& s, int m, Rng& rng) {
  ConicProgram p;
  p.structure = s;
  p.c = SparseSymMatrix::from_dense(random_sym(s, rng));
  for (int i = 0; i < m; ++i) {
    p.a.push_back(SparseSymMatrix::from_dense(random_sym(s, rng)));
    p.b.push_back(rng.normal());
  }
  return p;
}

}  // namespace

TEST(AffineData, TraceConstraint) {
  ConicProgram p;
  p.structure = BlockStructure({2});
  p.c = sparse({{0, 0, 1, 1.0}});
  p.a = {sparse({{0, 0, 0, 1.0}, {0, 1, 1, 1.0}})};
  p.b = {1.0};
  auto aff = build_affine_data(p);
  auto half = 0.5 * SymBlockMatrix::identity(p.structure);
  EXPECT_LE((aff.Y_Lperp - half).norm(), 1e-14);
}

TEST(AffineData, DiagonalConstraintOracle) {
  ConicProgram p;
  p.structure = BlockStructure({2});
  p.c = sparse({{0, 0, 1, 1.0}});
  p.a = {sparse({{0, 0, 0, 1.0}})};
  p.b = {3.0};
  auto aff = build_affine_data(p);
  auto off = unit_matrix(p.structure, 0, 0, 1);
  EXPECT_LE((aff.C_L - off).norm(), 1e-14);
  EXPECT_LE((aff.Y_Lperp - 3.0 * unit_matrix(p.structure, 0, 0, 0)).norm(), 1e-14);
}

TEST(AffineData, InvariantsOnRandomPrograms) {
  Rng rng(31);
  for (int t = 0; t < 10; ++t) {
    BlockStructure s({3, 2, 1});
    auto p = random_program(s, 1 + t % 6, rng);
    auto aff = build_affine_data(p);
    EXPECT_LE(aff.project_Lperp(aff.C_L).norm(), 1e-10 * (1 + aff.C.norm()));
    EXPECT_LE((aff.project_Lperp(aff.Y_Lperp) - aff.Y_Lperp).norm(), 1e-10 * (1 + aff.Y_Lperp.norm()));
    for (int i = 0; i < p.num_constraints(); ++i)
      EXPECT_NEAR(p.a[i].inner(aff.Y_Lperp), p.b[i], 1e-8 * std::max(1.0, std::abs(p.b[i])));
    EXPECT_LE(orthonormality_defect(aff.Lperp_basis()), 1e-10);
    EXPECT_EQ(aff.Lperp_basis().dim(), p.num_constraints());
  }
}

TEST(AffineData, DependentConsistentAndInconsistent) {
  ConicProgram p;
  p.structure = BlockStructure({2});
  p.a = {sparse({{0, 0, 0, 1.0}}), sparse({{0, 1, 1, 1.0}}), sparse({{0, 0, 0, 2.0}, {0, 1, 1, -1.0}})};
  p.b = {1.0, 2.0, 0.0};
  auto aff = build_affine_data(p);
  EXPECT_EQ(aff.lperp.rank(), 2);
  EXPECT_EQ(aff.lperp.kept_rows(), (std::vector<int>{0, 1}));
  p.b[2] = 0.5;
  EXPECT_THROW(build_affine_data(p), InfeasibleAffineError);
}

TEST(AffineData, ThetaOnOneEdge) {
  ConicProgram p;
  p.structure = BlockStructure({2});
  p.c = sparse({{0, 0, 0, -1.0}, {0, 0, 1, -1.0}, {0, 1, 1, -1.0}});
  p.a = {sparse({{0, 0, 0, 1.0}, {0, 1, 1, 1.0}}), sparse({{0, 0, 1, 1.0}})};
  p.b = {1.0, 0.0};
  auto aff = build_affine_data(p);
  EXPECT_NEAR(inner(SymBlockMatrix::identity(p.structure), aff.Y_Lperp), 1.0, 1e-10);
  EXPECT_NEAR(aff.Y_Lperp.get(0, 0, 1), 0.0, 1e-10);
}

TEST(CheckAdmissible, AmbientAndTiedExample) {
  auto p = tied_example();
  auto aff = build_affine_data(p);
  EXPECT_TRUE(check_admissible(SubspaceBasis::ambient(p.structure), aff).all());

  const auto& s = p.structure;
  auto S = orthonormalize({unit_matrix(s, 0, 0, 1), unit_matrix(s, 0, 0, 0), unit_matrix(s, 0, 1, 1),
                           unit_matrix(s, 0, 2, 2)});
  auto r = check_admissible(S, aff);
  EXPECT_TRUE(r.contains_points);
  EXPECT_TRUE(r.L_invariant);
  EXPECT_TRUE(r.square_closed);
}

TEST(CheckAdmissible, OffDiagonalAloneIsNotSquareClosed) {
  ConicProgram p;
  p.structure = BlockStructure({2});
  p.c = sparse({{0, 0, 1, 1.0}});
  auto aff = build_affine_data(p);
  auto S = orthonormalize({unit_matrix(p.structure, 0, 0, 1)});
  auto r = check_admissible(S, aff);
  EXPECT_TRUE(r.contains_points);
  EXPECT_FALSE(r.square_closed);
}

TEST(OptimalSubspace, TiedExampleIsMinimal) {
  auto p = tied_example();
  auto aff = build_affine_data(p);
  ClosureTrace trace;
  auto S = optimal_admissible_subspace(aff, kDefaultTol, 0, &trace);
  EXPECT_TRUE(check_admissible(S, aff).all());
  // Contained in the admissible span{E12+E21, E11, E22, E33}.
  const auto& s = p.structure;
  auto T = orthonormalize({unit_matrix(s, 0, 0, 1), unit_matrix(s, 0, 0, 0), unit_matrix(s, 0, 1, 1),
                           unit_matrix(s, 0, 2, 2)});
  EXPECT_LE(containment_residual(S, T), 1e-8);
  EXPECT_LE(S.dim(), 4);
  for (size_t i = 1; i < trace.dims.size(); ++i) EXPECT_GE(trace.dims[i], trace.dims[i - 1]);
}

TEST(OptimalSubspace, DiagonalDataStaysDiagonal) {
  Rng rng(37);
  ConicProgram p;
  p.structure = BlockStructure({4});
  p.c = sparse({{0, 0, 0, 1.0}, {0, 1, 1, -2.0}, {0, 3, 3, 0.5}});
  p.a = {sparse({{0, 0, 0, 1.0}, {0, 2, 2, 3.0}}), sparse({{0, 1, 1, 1.0}, {0, 3, 3, -1.0}})};
  p.b = {1.0, 0.25};
  auto aff = build_affine_data(p);
  auto S = optimal_admissible_subspace(aff);
  EXPECT_TRUE(check_admissible(S, aff).all());
  for (int k = 0; k < S.dim(); ++k) {
    auto x = S.element(k);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (i != j) EXPECT_LE(std::abs(x.get(0, i, j)), 1e-12);
  }
}

TEST(OptimalSubspace, GenericDataSaturates) {
  Rng rng(41);
  for (int t = 0; t < 5; ++t) {
    auto p = random_program(BlockStructure({3}), 2, rng);
    auto aff = build_affine_data(p);
    ClosureTrace trace;
    auto S = optimal_admissible_subspace(aff, kDefaultTol, 0, &trace);
    EXPECT_EQ(S.dim(), 6);
    ASSERT_FALSE(trace.dims.empty());
    EXPECT_EQ(trace.dims.front(), 6);
  }
}

TEST(OptimalSubspace, EmptyStartGivesZeroSpace) {
  ConicProgram p;
  p.structure = BlockStructure({2});
  p.c = sparse({{0, 0, 0, 1.0}});
  p.a = {sparse({{0, 0, 0, 1.0}})};
  p.b = {0.0};
  auto aff = build_affine_data(p);
  ClosureTrace trace;
  auto S = optimal_admissible_subspace(aff, kDefaultTol, 0, &trace);
  EXPECT_EQ(S.dim(), 0);
  EXPECT_FALSE(trace.diagnostics.empty());
}

TEST(OptimalSubspace, PositiveUnitalAndIdempotentClosure) {
  Rng rng(43);
  auto p = tied_example();
  auto aff = build_affine_data(p);
  auto S = optimal_admissible_subspace(aff);
  for (int t = 0; t < 100; ++t) {
    auto x = random_psd(p.structure, rng);
    EXPECT_GE(min_eigenvalue(S.project(x)), -1e-8 * x.norm());
  }
  auto e = unit_element(S);
  EXPECT_LE((square(e) - e).norm(), 1e-8);
  for (int k = 0; k < S.dim(); ++k) {
    auto b = S.element(k);
    EXPECT_LE((jordan_product(e, b) - b).norm(), 1e-8);
  }

  // Restricting the data to S and closing again keeps the dimension.
  ConicProgram q = p;
  q.c = SparseSymMatrix::from_dense(S.project(p.c.dense(p.structure)), 1e-14);
  for (auto& a : q.a) a = SparseSymMatrix::from_dense(S.project(a.dense(p.structure)), 1e-14);
  auto S2 = optimal_admissible_subspace(build_affine_data(q));
  EXPECT_EQ(S2.dim(), S.dim());
}

TEST(StarAlgebra, SmallCases) {
  ConicProgram p;
  p.structure = BlockStructure({3});
  p.c = sparse({{0, 0, 0, 1.0}, {0, 1, 1, 1.0}, {0, 2, 2, 1.0}});
  EXPECT_EQ(star_algebra_subspace(p).dim(), 1);
  EXPECT_EQ(star_algebra_dimension(p), 1);

  ConicProgram q;
  q.structure = BlockStructure({2});
  q.c = sparse({{0, 0, 0, 1.0}});
  q.a = {sparse({{0, 1, 1, 1.0}})};
  q.b = {1.0};
  auto S = star_algebra_subspace(q);
  EXPECT_EQ(S.dim(), 2);
  EXPECT_LE(S.residual(svec(unit_matrix(q.structure, 0, 0, 0))), 1e-12);
}

TEST(StarAlgebra, TiedBlocksUseSpinUp) {
  // diag(X, X) pattern: a copy of S^2 repeated in two blocks.
  ConicProgram p;
  p.structure = BlockStructure({2, 2});
  p.c = sparse({{0, 0, 0, 1.0}, {1, 0, 0, 1.0}});
  p.a = {sparse({{0, 0, 1, 1.0}, {1, 0, 1, 1.0}})};
  p.b = {1.0};
  auto S = star_algebra_subspace(p);
  // Generated algebra is M_2 embedded diagonally; symmetric part has dim 3.
  EXPECT_EQ(S.dim(), 3);
  EXPECT_EQ(star_algebra_dimension(p), 3);
}

TEST(StarAlgebra, ShortcutAgreesWithExplicitBasisOnRandomData) {
  Rng rng(47);
  auto p = random_program(BlockStructure({3, 2}), 2, rng);
  EXPECT_EQ(star_algebra_dimension(p), 6 + 3);
  EXPECT_EQ(star_algebra_subspace(p).dim(), 9);
}

TEST(StarAlgebra, CapacityGuard) {
  ConicProgram p;
  p.structure = BlockStructure({2, 2});
  p.c = sparse({{0, 0, 0, 1.0}, {1, 0, 0, 1.0}});
  p.a = {sparse({{0, 0, 1, 1.0}, {1, 0, 1, 1.0}})};
  p.b = {1.0};
  EXPECT_THROW(star_algebra_subspace(p, kDefaultTol, 2), CapacityError);
}
