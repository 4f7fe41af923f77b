#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Sparse>

#include "dsu.hpp"
#include "jred/error.hpp"
#include "jred/kernels.hpp"
#include "jred/random.hpp"
#include "jred/subspace.hpp"

namespace jred {

namespace {

// The *-algebra described as: per block, an orthonormal basis U_k of the
// range of the unit, and either irreducible coordinate groups (shortcut) or
// an explicit spanning set of words.
struct StarAlgebra {
  BlockStructure structure;
  std::vector<Eigen::MatrixXd> range;                   // n_k x r_k
  std::vector<std::vector<Eigen::MatrixXd>> groups;     // per block: n_k x |c| frames
  std::vector<std::vector<Eigen::MatrixXd>> words;      // spin-up basis, compressed blocks
  bool shortcut = false;
  long sym_dim = 0;
};

std::vector<const SparseSymMatrix*> generators(const ConicProgram& p) {
  std::vector<const SparseSymMatrix*> g;
  if (!p.c.empty()) g.push_back(&p.c);
  for (const auto& a : p.a)
    if (!a.empty()) g.push_back(&a);
  return g;
}

using Compressed = std::vector<Eigen::MatrixXd>;

Eigen::VectorXd flatten(const Compressed& m) {
  Index n = 0;
  for (const auto& b : m) n += b.size();
  Eigen::VectorXd v(n);
  Index p = 0;
  for (const auto& b : m) {
    std::copy(b.data(), b.data() + b.size(), v.data() + p);
    p += b.size();
  }
  return v;
}

Compressed unflatten(const Eigen::VectorXd& v, const std::vector<Index>& dims) {
  Compressed m;
  Index p = 0;
  for (Index r : dims) {
    m.push_back(Eigen::Map<const Eigen::MatrixXd>(v.data() + p, r, r));
    p += r * r;
  }
  return m;
}

bool try_shortcut(StarAlgebra& alg, const std::vector<const SparseSymMatrix*>& gens, std::uint64_t seed) {
  const BlockStructure& st = alg.structure;
  const int nb = st.num_blocks();
  Rng rng(seed, 0x57a);
  SymBlockMatrix g(st);
  for (const auto* m : gens) {
    const double t = rng.normal();
    for (const auto& e : m->entries()) g.set(e.block, e.i, e.j, g.get(e.block, e.i, e.j) + t * e.value);
  }

  // Eigenvectors of the compressed generic element, mapped back: n_k x r_k.
  std::vector<Eigen::MatrixXd> qs(nb);
  std::vector<std::pair<double, Index>> all;
  std::vector<Index> start(nb + 1, 0);
  double scale = 0;
  for (int k = 0; k < nb; ++k) {
    const Index r = alg.range[k].cols();
    start[k + 1] = start[k] + r;
    if (r == 0) continue;
    Eigen::MatrixXd gc = alg.range[k].transpose() * g.block(k) * alg.range[k];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gc);
    qs[k] = alg.range[k] * es.eigenvectors();
    for (Index a = 0; a < r; ++a) {
      all.emplace_back(es.eigenvalues()[a], start[k] + a);
      scale = std::max(scale, std::abs(es.eigenvalues()[a]));
    }
  }
  std::sort(all.begin(), all.end());
  for (size_t i = 1; i < all.size(); ++i)
    if (all[i].first - all[i - 1].first <= 1e-8 * scale) return false;

  detail::DisjointSets dsu(static_cast<std::size_t>(start[nb]));
  for (const auto* m : gens) {
    std::vector<Eigen::MatrixXd> acc(nb);
    for (const auto& e : m->entries()) {
      const Index r = alg.range[e.block].cols();
      if (r <= 1) continue;
      auto& a = acc[e.block];
      if (a.size() == 0) a = Eigen::MatrixXd::Zero(r, r);
      const auto& q = qs[e.block];
      if (e.i == e.j) {
        a.noalias() += e.value * q.row(e.i).transpose() * q.row(e.i);
      } else {
        Eigen::MatrixXd o = e.value * q.row(e.i).transpose() * q.row(e.j);
        a += o + o.transpose();
      }
    }
    for (int k = 0; k < nb; ++k) {
      if (acc[k].size() == 0) continue;
      const Index r = acc[k].rows();
      const double cut = 1e-6 * std::max(acc[k].cwiseAbs().maxCoeff(), 1e-300);
      for (Index b = 0; b < r; ++b)
        for (Index a = 0; a < b; ++a)
          if (std::abs(acc[k](a, b)) > cut)
            dsu.unite(static_cast<std::size_t>(start[k] + a), static_cast<std::size_t>(start[k] + b));
    }
  }

  alg.groups.assign(nb, {});
  std::vector<long> root_to_group(static_cast<size_t>(start[nb]), -1);
  for (int k = 0; k < nb; ++k) {
    const Index r = alg.range[k].cols();
    std::vector<std::vector<Index>> members;
    for (Index a = 0; a < r; ++a) {
      auto root = dsu.find(static_cast<std::size_t>(start[k] + a));
      if (root_to_group[root] < 0) {
        root_to_group[root] = static_cast<long>(members.size());
        members.emplace_back();
      }
      members[root_to_group[root]].push_back(a);
    }
    for (const auto& mem : members) {
      Eigen::MatrixXd w(st.order(k), static_cast<Index>(mem.size()));
      for (size_t c = 0; c < mem.size(); ++c) w.col(static_cast<Index>(c)) = qs[k].col(mem[c]);
      const auto s = static_cast<long>(mem.size());
      alg.sym_dim += s * (s + 1) / 2;
      alg.groups[k].push_back(std::move(w));
    }
  }
  alg.shortcut = true;
  return true;
}

void spin_up(StarAlgebra& alg, const std::vector<Compressed>& gens, double tol, long cap) {
  std::vector<Index> dims;
  for (const auto& u : alg.range) dims.push_back(u.cols());
  std::vector<Eigen::VectorXd> basis;
  auto add = [&](const Compressed& m) {
    Eigen::VectorXd v = flatten(m);
    const double ref = std::max(1.0, v.norm());
    const auto n = static_cast<std::size_t>(v.size());
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) kernels::axpy(-kernels::dot(q.data(), v.data(), n), q.data(), v.data(), n);
    const double r = v.norm();
    if (r <= tol * ref) return false;
    if (static_cast<long>(basis.size()) >= cap)
      throw CapacityError("*-algebra dimension exceeds cap " + std::to_string(cap));
    basis.push_back(v / r);
    return true;
  };
  size_t frontier = 0;
  for (const auto& g : gens) {
    Eigen::VectorXd v = flatten(g);
    if (v.norm() > 0) {
      Compressed m = g;
      const double s = 1.0 / v.norm();
      for (auto& b : m) b *= s;
      add(m);
    }
  }
  while (frontier < basis.size()) {
    Compressed w = unflatten(basis[frontier], dims);
    ++frontier;
    for (const auto& g : gens) {
      Compressed p(w.size());
      for (size_t k = 0; k < w.size(); ++k) p[k] = w[k] * g[k];
      add(p);
    }
  }
  for (const auto& v : basis) alg.words.push_back(unflatten(v, dims));
}

StarAlgebra build(const ConicProgram& program, double tol, long cap, bool allow_shortcut) {
  StarAlgebra alg;
  alg.structure = program.structure;
  const BlockStructure& st = alg.structure;
  const int nb = st.num_blocks();
  const auto gens = generators(program);

  // Unit: projector onto the sum of the generator ranges, i.e. the range of
  // the sum of their squares.
  std::vector<Eigen::MatrixXd> sq(nb);
  for (int k = 0; k < nb; ++k) sq[k] = Eigen::MatrixXd::Zero(st.order(k), st.order(k));
  for (const auto* m : gens) {
    std::vector<std::vector<Eigen::Triplet<double>>> trip(nb);
    for (const auto& e : m->entries()) {
      trip[e.block].emplace_back(e.i, e.j, e.value);
      if (e.i != e.j) trip[e.block].emplace_back(e.j, e.i, e.value);
    }
    for (int k = 0; k < nb; ++k) {
      if (trip[k].empty()) continue;
      Eigen::SparseMatrix<double> g(st.order(k), st.order(k));
      g.setFromTriplets(trip[k].begin(), trip[k].end());
      Eigen::SparseMatrix<double> g2 = g * g;
      for (int c = 0; c < g2.outerSize(); ++c)
        for (Eigen::SparseMatrix<double>::InnerIterator it(g2, c); it; ++it) sq[k](it.row(), it.col()) += it.value();
    }
  }
  for (int k = 0; k < nb; ++k) {
    const int n = st.order(k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sq[k]);
    const double top = es.eigenvalues().cwiseAbs().maxCoeff();
    std::vector<Index> keep;
    for (Index a = 0; a < n; ++a)
      if (top > 0 && es.eigenvalues()[a] > 1e-12 * top) keep.push_back(a);
    Eigen::MatrixXd u(n, static_cast<Index>(keep.size()));
    for (size_t c = 0; c < keep.size(); ++c) u.col(static_cast<Index>(c)) = es.eigenvectors().col(keep[c]);
    alg.range.push_back(std::move(u));
  }

  if (allow_shortcut && try_shortcut(alg, gens, 0)) return alg;

  std::vector<Compressed> cg;
  for (const auto* m : gens) {
    SymBlockMatrix g = m->dense(st);
    Compressed c(nb);
    for (int k = 0; k < nb; ++k) c[k] = alg.range[k].transpose() * g.block(k) * alg.range[k];
    cg.push_back(std::move(c));
  }
  if (cap <= 0) {
    cap = 0;
    for (int n : st.orders()) cap += static_cast<long>(n) * n;
  }
  spin_up(alg, cg, tol, cap);
  return alg;
}

SubspaceBasis symmetric_part(const StarAlgebra& alg, double tol) {
  const BlockStructure& st = alg.structure;
  const int nb = st.num_blocks();
  if (alg.shortcut) {
    Eigen::MatrixXd q(st.dim(), alg.sym_dim);
    Index col = 0;
    constexpr double kInvSqrt2 = 0.70710678118654752440;
    for (int k = 0; k < nb; ++k) {
      for (const auto& w : alg.groups[k]) {
        for (Index b = 0; b < w.cols(); ++b) {
          for (Index a = 0; a <= b; ++a) {
            SymBlockMatrix x(st);
            Eigen::MatrixXd m = w.col(a) * w.col(b).transpose();
            x.block(k) = a == b ? m : Eigen::MatrixXd(kInvSqrt2 * (m + m.transpose()));
            q.col(col++) = svec(x);
          }
        }
      }
    }
    return SubspaceBasis(st, std::move(q), tol);
  }
  std::vector<SymBlockMatrix> sym;
  for (const auto& w : alg.words) {
    SymBlockMatrix x(st);
    for (int k = 0; k < nb; ++k) {
      Eigen::MatrixXd full = alg.range[k] * w[k] * alg.range[k].transpose();
      x.block(k) = 0.5 * (full + full.transpose());
    }
    sym.push_back(std::move(x));
  }
  std::vector<Eigen::VectorXd> v;
  for (const auto& x : sym) v.push_back(svec(x));
  OrthoBuilder b(st);
  for (const auto& x : v) b.add(x, tol * std::max(1.0, x.norm()));
  return b.finish(tol);
}

}  // namespace

SubspaceBasis star_algebra_subspace(const ConicProgram& program, double tol, long cap) {
  return symmetric_part(build(program, tol, cap, true), tol);
}

long star_algebra_dimension(const ConicProgram& program, double tol, long cap) {
  StarAlgebra alg = build(program, tol, cap, true);
  if (alg.shortcut) return alg.sym_dim;
  return symmetric_part(alg, tol).dim();
}

}  // namespace jred
