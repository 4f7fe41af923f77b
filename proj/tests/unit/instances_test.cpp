#include <gtest/gtest.h>

#include <bit>
#include <set>

#include "jred/combinat.hpp"
#include "jred/error.hpp"
#include "jred/instances.hpp"
#include "jred/jordan.hpp"
#include "jred/subspace.hpp"

using namespace jred;

namespace {

long hamming_edges(int q, const std::vector<int>& dist) {
  const std::set<int> d(dist.begin(), dist.end());
  long edges = 0;
  for (unsigned u = 0; u < (1u << q); ++u)
    for (unsigned v = u + 1; v < (1u << q); ++v)
      if (d.count(std::popcount(u ^ v))) ++edges;
  return edges;
}

// Number of classes of n^4 index tuples under swapping i<->k, j<->l
// and (ij,kl) <-> (kl,ij), counted by canonical representatives.
long moment_classes(int n) {
  std::set<std::array<int, 4>> reps;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          std::array<int, 4> t{i, j, k, l};
          for (auto c : {std::array<int, 4>{k, l, i, j}, std::array<int, 4>{i, l, k, j}, std::array<int, 4>{k, j, i, l}})
            t = std::min(t, c);
          reps.insert(t);
        }
  return static_cast<long>(reps.size());
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Span of the characteristic matrices of the pair orbits of a permutation
// group on [n], orbits found by closing under the generators.
SubspaceBasis orbit_span(int n, const std::vector<std::vector<int>>& gens) {
  BlockStructure s({n});
  std::vector<int> label(static_cast<size_t>(n * n), -1);
  int next = 0;
  std::vector<SymBlockMatrix> chars;
  for (int start = 0; start < n * n; ++start) {
    if (label[start] >= 0) continue;
    SymBlockMatrix c(s);
    std::vector<int> stack{start};
    label[start] = next;
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      const int i = p / n, j = p % n;
      c.block(0)(i, j) = 1.0;
      std::vector<int> images{j * n + i};
      for (const auto& g : gens) images.push_back(g[i] * n + g[j]);
      for (int q : images)
        if (label[q] < 0) {
          label[q] = next;
          stack.push_back(q);
        }
    }
    chars.push_back(c);
    ++next;
  }
  return orthonormalize(chars);
}

double definite_margin(const SymBlockMatrix& x) { return min_eigenvalue(x); }

}  // namespace

TEST(ThetaSdp, SmallestGraph) {
  ConicProgram p = theta_sdp({1, {1}});
  EXPECT_EQ(p.structure.orders(), std::vector<int>({2}));
  EXPECT_EQ(p.num_constraints(), 2);
  EXPECT_THROW(theta_sdp({1, {2}}), DomainError);
  EXPECT_THROW(theta_sdp({0, {1}}), DomainError);
}

TEST(ThetaSdp, ConstraintCountMatchesEdgeCount) {
  for (auto spec : {HammingGraphSpec{2, {2}}, HammingGraphSpec{4, {3, 4}}, HammingGraphSpec{7, {5, 6}}}) {
    ConicProgram p = theta_sdp(spec);
    EXPECT_EQ(p.structure.orders(), std::vector<int>({1 << spec.q}));
    EXPECT_EQ(p.num_constraints(), 1 + hamming_edges(spec.q, spec.distances));
  }
  EXPECT_EQ(theta_sdp({7, {5, 6}}).num_constraints(), 1793);
  EXPECT_EQ(theta_sdp({2, {2}}).num_constraints(), 3);
}

TEST(ThetaSdp, DataIsConsistent) {
  ConicProgram p = theta_sdp({4, {3, 4}});
  const BlockStructure& s = p.structure;
  // Distinct edge constraints have disjoint supports.
  for (int i = 1; i < p.num_constraints(); ++i) {
    EXPECT_EQ(p.b[i], 0.0);
    EXPECT_EQ(p.a[i].entries().size(), 1u);
  }
  std::set<std::pair<int, int>> seen;
  for (int i = 1; i < p.num_constraints(); ++i) seen.insert({p.a[i].entries()[0].i, p.a[i].entries()[0].j});
  EXPECT_EQ(static_cast<int>(seen.size()), p.num_constraints() - 1);
  // I / n is feasible with objective -1.
  SymBlockMatrix x = SymBlockMatrix::identity(s);
  x.block(0) /= s.order(0);
  EXPECT_LT(p.affine_residual(x), 1e-12);
  EXPECT_NEAR(p.objective(x), -1.0, 1e-12);
}

TEST(CprankSdp, ZHasExpectedShape) {
  ConicProgram p = cprank_sdp(cprank_z());
  std::vector<int> orders{10, 9};
  for (int i = 0; i < 9; ++i) orders.push_back(1);
  EXPECT_EQ(p.structure.orders(), orders);
  EXPECT_EQ(p.num_constraints(), moment_classes(3) + 1);
  EXPECT_EQ(p.num_constraints(), 37);
  EXPECT_EQ(p.cost_nnz(), 70);
}

TEST(CprankSdp, KroneckerSquareHasExpectedShape) {
  Eigen::MatrixXd z = cprank_z();
  ConicProgram p = cprank_sdp(kron(z, z));
  EXPECT_EQ(p.structure.order(0), 82);
  EXPECT_EQ(p.structure.order(1), 81);
  EXPECT_EQ(p.structure.num_blocks(), 2 + 81);
  EXPECT_EQ(p.num_constraints(), moment_classes(9) + 1);
  EXPECT_EQ(p.num_constraints(), 2026);
}

TEST(CprankSdp, TinyInstance) {
  Eigen::MatrixXd w(1, 1);
  w << 2.0;
  ConicProgram p = cprank_sdp(w);
  EXPECT_EQ(p.structure.orders(), std::vector<int>({2, 1, 1}));
  EXPECT_EQ(p.num_constraints(), 2);
  // Cost: w in the moment row, w^2 in the Kronecker and bound blocks.
  ASSERT_EQ(p.c.entries().size(), 3u);
  SymBlockMatrix c = p.c.dense(p.structure);
  EXPECT_EQ(c.get(0, 0, 1), 2.0);
  EXPECT_EQ(c.get(1, 0, 0), 4.0);
  EXPECT_EQ(c.get(2, 0, 0), 4.0);
}

TEST(CprankSdp, RejectsBadInput) {
  Eigen::MatrixXd ns(2, 2);
  ns << 1, 2, 0, 1;
  EXPECT_THROW(cprank_sdp(ns), DomainError);
  Eigen::MatrixXd neg(2, 2);
  neg << 1, -1, -1, 1;
  EXPECT_THROW(cprank_sdp(neg), DomainError);
}

TEST(PlantedSdp, PlantedPointsAreStrictlyFeasible) {
  for (auto g : {SymmetryGroup::kTrivial, SymmetryGroup::kCyclic, SymmetryGroup::kDihedral, SymmetryGroup::kBlockCopy})
    for (int n : {4, 5, 6}) {
      PlantedInstance inst = planted_symmetry_sdp(n, g, 11);
      const ConicProgram& p = inst.program;
      EXPECT_GT(definite_margin(inst.x0), 0.0);
      EXPECT_GT(definite_margin(inst.s0), 0.0);
      EXPECT_LT(p.affine_residual(inst.x0), 1e-10);
      SymBlockMatrix s = p.c.dense(p.structure);
      for (int i = 0; i < p.num_constraints(); ++i) s = s - inst.y0[i] * p.a[i].dense(p.structure);
      EXPECT_LT((s - inst.s0).norm(), 1e-10 * std::max(1.0, inst.s0.norm()));
    }
}

TEST(PlantedSdp, PartitionSubspaceLiesInOrbitSpan) {
  for (auto g : {SymmetryGroup::kCyclic, SymmetryGroup::kDihedral})
    for (int n : {4, 6}) {
      PlantedInstance inst = planted_symmetry_sdp(n, g, 5);
      SubspaceBasis orbits = orbit_span(n, group_generators(g, n));
      PartitionResult part = optimal_partition_subspace(build_affine_data(inst.program), 3);
      for (int c = 0; c < part.basis.dim(); ++c) EXPECT_LT(orbits.residual(part.basis.matrix().col(c)), 1e-8);
    }
}

TEST(PlantedSdp, BlockCopyHasTiedIdeals) {
  PlantedInstance inst = planted_symmetry_sdp(5, SymmetryGroup::kBlockCopy, 2);
  SubspaceBasis s = optimal_admissible_subspace(build_affine_data(inst.program));
  EXPECT_EQ(s.dim(), 4);
  IdealDecomposition d = decompose_ideals(s, 1);
  EXPECT_EQ(d.ranks(), RankTuple({2, 1}));
}

TEST(C4Lp, OptimalSubspaceMatchesOrbitCount) {
  PlantedInstance inst = c4_lp(0);
  EXPECT_EQ(inst.program.structure.num_blocks(), 12);
  EXPECT_EQ(inst.program.num_constraints(), 12);
  SubspaceBasis s = optimal_admissible_subspace(build_affine_data(inst.program));
  EXPECT_EQ(s.dim(), 3);
}

TEST(GenerateInstance, NamesAndDeterminism) {
  EXPECT_EQ(generate_instance("hamming:7:5,6").num_constraints(), 1793);
  EXPECT_EQ(generate_instance("cprank:Z").name, "cprank_Z");
  EXPECT_EQ(generate_instance("planted:cyclic:6").name, "planted_cyclic_6");
  EXPECT_THROW(generate_instance("hamming:x"), DomainError);
  EXPECT_THROW(generate_instance("unknown:1"), DomainError);
  for (const auto& name : bundled_instances()) {
    ConicProgram a = generate_instance(name, 4);
    ConicProgram b = generate_instance(name, 4);
    ASSERT_EQ(a.num_constraints(), b.num_constraints()) << name;
    EXPECT_EQ(a.b, b.b) << name;
    for (int i = 0; i < a.num_constraints(); ++i) {
      ASSERT_EQ(a.a[i].entries().size(), b.a[i].entries().size()) << name;
      for (size_t e = 0; e < a.a[i].entries().size(); ++e)
        EXPECT_EQ(a.a[i].entries()[e].value, b.a[i].entries()[e].value) << name;
    }
  }
}
