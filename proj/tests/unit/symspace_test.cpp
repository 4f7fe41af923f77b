#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "jred/error.hpp"
#include "jred/symspace.hpp"
#include "test_util.hpp"

using namespace jred;
using jred::testing::orthonormality_defect;
using jred::testing::random_psd;
using jred::testing::random_sym;
using jred::testing::unit_matrix;

namespace {

// Trace of XY by explicit double loop.
double trace_product(const SymBlockMatrix& x, const SymBlockMatrix& y) {
  double s = 0;
  for (int k = 0; k < x.num_blocks(); ++k)
    for (int i = 0; i < x.block(k).rows(); ++i)
      for (int j = 0; j < x.block(k).cols(); ++j) s += x.block(k)(i, j) * y.block(k)(j, i);
  return s;
}

}  // namespace

TEST(BlockStructure, DimensionAndEntries) {
  BlockStructure s({3, 1, 2});
  EXPECT_EQ(s.dim(), 6 + 1 + 3);
  for (Index p = 0; p < s.dim(); ++p) {
    auto e = s.entry(p);
    EXPECT_LE(e.i, e.j);
    EXPECT_EQ(s.svec_index(e.block, e.i, e.j), p);
    EXPECT_EQ(s.svec_index(e.block, e.j, e.i), p);
  }
  EXPECT_THROW(BlockStructure({2, 0}), StructureError);
}

TEST(Inner, Trivial) {
  BlockStructure s3({3});
  EXPECT_DOUBLE_EQ(inner(SymBlockMatrix::identity(s3), SymBlockMatrix::identity(s3)), 3.0);
  BlockStructure s2({2});
  auto e12 = unit_matrix(s2, 0, 0, 1);
  EXPECT_DOUBLE_EQ(inner(e12, e12), 2.0);
}

TEST(Inner, MatchesSvecDotAndTraceOracle) {
  Rng rng(3);
  BlockStructure s({3, 2});
  for (int t = 0; t < 20; ++t) {
    auto x = random_sym(s, rng), y = random_sym(s, rng);
    double ref = trace_product(x, y);
    EXPECT_NEAR(inner(x, y), ref, 1e-12 * x.norm() * y.norm());
    EXPECT_NEAR(svec(x).dot(svec(y)), ref, 1e-12 * x.norm() * y.norm());
  }
}

TEST(Inner, StructureMismatchThrows) {
  BlockStructure a({2}), b({3});
  EXPECT_THROW(inner(SymBlockMatrix(a), SymBlockMatrix(b)), StructureError);
}

TEST(Svec, RoundTripIsExact) {
  Rng rng(5);
  BlockStructure s({4, 1, 3});
  auto x = random_sym(s, rng);
  auto y = smat(s, svec(x));
  for (int k = 0; k < s.num_blocks(); ++k) EXPECT_LE((x.block(k) - y.block(k)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(JordanProduct, UnitAndHandComputed) {
  Rng rng(9);
  BlockStructure s({3});
  auto x = random_sym(s, rng);
  auto p = jordan_product(SymBlockMatrix::identity(s), x);
  EXPECT_LE((p - x).norm(), 1e-14);

  BlockStructure s2({2});
  auto e11 = unit_matrix(s2, 0, 0, 0);
  auto off = unit_matrix(s2, 0, 0, 1);
  // E11 (E12+E21) = E12, (E12+E21) E11 = E21.
  auto expect = 0.5 * off;
  EXPECT_LE((jordan_product(e11, off) - expect).norm(), 1e-15);
}

TEST(JordanProduct, PolarizationIdentity) {
  Rng rng(11);
  BlockStructure s({4});
  for (int t = 0; t < 10; ++t) {
    auto x = random_sym(s, rng), y = random_sym(s, rng);
    auto pol = 0.5 * (square(x + y) - square(x) - square(y));
    EXPECT_LE((jordan_product(x, y) - pol).norm(), 1e-12 * (1 + x.norm() * y.norm()));
    EXPECT_LE((jordan_product(x, y) - jordan_product(y, x)).norm(), 1e-14 * (1 + x.norm() * y.norm()));
  }
}

TEST(Orthonormalize, DependentAndIndependent) {
  BlockStructure s({2});
  auto e11 = unit_matrix(s, 0, 0, 0);
  EXPECT_EQ(orthonormalize({e11, 2.0 * e11}).dim(), 1);
  auto b = orthonormalize({e11, unit_matrix(s, 0, 1, 1), unit_matrix(s, 0, 0, 1)});
  EXPECT_EQ(b.dim(), 3);
  EXPECT_EQ(orthonormalize({}).dim(), 0);
}

TEST(Orthonormalize, RandomMatchesSingularValueRank) {
  Rng rng(13);
  BlockStructure s({5});
  std::vector<SymBlockMatrix> v;
  Eigen::MatrixXd stacked(s.dim(), 20);
  for (int t = 0; t < 20; ++t) {
    v.push_back(random_sym(s, rng));
    stacked.col(t) = svec(v.back());
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked);
  const auto& sv = svd.singularValues();
  int rank = static_cast<int>((sv.array() > 1e-9 * sv[0]).count());
  auto b = orthonormalize(v);
  EXPECT_EQ(b.dim(), rank);
  EXPECT_EQ(b.dim(), 15);
  EXPECT_LE(orthonormality_defect(b), 1e-10);
}

TEST(Orthonormalize, SpanInvariantUnderPermutation) {
  Rng rng(17);
  BlockStructure s({4, 2});
  std::vector<SymBlockMatrix> v;
  for (int t = 0; t < 6; ++t) v.push_back(random_sym(s, rng));
  v.push_back(v[0] + 2.0 * v[3]);
  auto a = orthonormalize(v);
  std::reverse(v.begin(), v.end());
  auto b = orthonormalize(v);
  EXPECT_EQ(a.dim(), b.dim());
  EXPECT_LE(containment_residual(a, b), 1e-9);
  EXPECT_LE(containment_residual(b, a), 1e-9);
}

TEST(Project, TrivialCases) {
  Rng rng(19);
  BlockStructure s({3});
  auto x = random_sym(s, rng);
  auto b = orthonormalize({(1.0 / x.norm()) * x});
  EXPECT_LE((project_onto_span(b, x) - x).norm(), 1e-12 * x.norm());
  auto b11 = orthonormalize({unit_matrix(s, 0, 0, 0)});
  EXPECT_LE(project_onto_span(b11, unit_matrix(s, 0, 1, 1)).norm(), 1e-15);
}

TEST(Project, IdempotentSelfAdjointContraction) {
  Rng rng(23);
  BlockStructure s({4});
  std::vector<SymBlockMatrix> v;
  for (int t = 0; t < 4; ++t) v.push_back(random_sym(s, rng));
  auto b = orthonormalize(v);
  ASSERT_EQ(b.dim(), 4);
  for (int t = 0; t < 20; ++t) {
    auto x = random_sym(s, rng), y = random_sym(s, rng);
    auto px = project_onto_span(b, x);
    EXPECT_LE((project_onto_span(b, px) - px).norm(), 1e-12 * x.norm());
    EXPECT_NEAR(inner(px, y), inner(x, project_onto_span(b, y)), 1e-12 * x.norm() * y.norm());
    EXPECT_LE(px.norm(), x.norm() * (1 + 1e-14));
  }
}

TEST(MinEigenvalue, PsdAndIndefinite) {
  Rng rng(29);
  BlockStructure s({3, 1});
  auto p = random_psd(s, rng);
  p.block(1)(0, 0) = 2.0;
  EXPECT_GE(min_eigenvalue(p), -1e-12);
  p.block(1)(0, 0) = -1.0;
  EXPECT_DOUBLE_EQ(min_eigenvalue(p), -1.0);
}
