#include "jred/jordan.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "dsu.hpp"
#include "jred/error.hpp"
#include "jred/random.hpp"

namespace jred {

namespace {

constexpr std::uint64_t kStreamRange = 0x31;
constexpr std::uint64_t kStreamCenter = 0x32;
constexpr std::uint64_t kStreamSplit = 0x33;
constexpr std::uint64_t kStreamRank = 0x34;
constexpr std::uint64_t kStreamFrame = 0x35;
constexpr int kAttempts = 5;

// Relative thresholds for grouping eigenvalues of a generic element.
constexpr double kJoin = 1e-7;
constexpr double kSeparate = 1e-5;

struct EigenPair {
  double value;
  int block;
  Index col;
};

// Subspace compressed to the range of its unit: per block, U_k^T B U_k.
struct Compressed {
  BlockStructure structure;
  std::vector<Eigen::MatrixXd> u;
  std::vector<std::vector<Eigen::MatrixXd>> elems;

  int num_blocks() const { return static_cast<int>(u.size()); }
  std::vector<Eigen::MatrixXd> combine(const Eigen::VectorXd& c) const {
    std::vector<Eigen::MatrixXd> x(u.size());
    for (size_t k = 0; k < u.size(); ++k) x[k] = Eigen::MatrixXd::Zero(u[k].cols(), u[k].cols());
    for (size_t a = 0; a < elems.size(); ++a) {
      if (c[static_cast<Index>(a)] == 0.0) continue;
      for (size_t k = 0; k < u.size(); ++k) x[k] += c[static_cast<Index>(a)] * elems[a][k];
    }
    return x;
  }
};

Compressed compress(const SubspaceBasis& s, std::uint64_t seed) {
  const BlockStructure& st = s.structure();
  Compressed c;
  c.structure = st;
  Rng rng(seed, kStreamRange);
  SymBlockMatrix z = smat(st, s.matrix() * rng.normal_vector(s.dim()));
  std::vector<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>> es(st.num_blocks());
  double top = 0;
  for (int k = 0; k < st.num_blocks(); ++k) {
    es[k].compute(z.block(k));
    if (st.order(k) > 0) top = std::max(top, es[k].eigenvalues().cwiseAbs().maxCoeff());
  }
  const double cut = 1e-8 * top;
  c.u.resize(st.num_blocks());
  for (int k = 0; k < st.num_blocks(); ++k) {
    const auto& ev = es[k].eigenvalues();
    std::vector<Index> keep;
    for (Index a = 0; a < ev.size(); ++a)
      if (std::abs(ev[a]) > cut) keep.push_back(a);
    c.u[k].resize(st.order(k), static_cast<Index>(keep.size()));
    for (size_t a = 0; a < keep.size(); ++a) c.u[k].col(static_cast<Index>(a)) = es[k].eigenvectors().col(keep[a]);
  }
  c.elems.resize(s.dim());
  for (int a = 0; a < s.dim(); ++a) {
    SymBlockMatrix b = s.element(a);
    c.elems[a].resize(st.num_blocks());
    for (int k = 0; k < st.num_blocks(); ++k) c.elems[a][k] = c.u[k].transpose() * b.block(k) * c.u[k];
  }
  return c;
}

// Groups sorted eigenvalues. Returns false when a gap is neither clearly
// zero nor clearly positive.
bool cluster_sorted(const std::vector<EigenPair>& pairs, std::vector<std::vector<EigenPair>>& out) {
  out.clear();
  if (pairs.empty()) return true;
  double scale = 0;
  for (const auto& p : pairs) scale = std::max(scale, std::abs(p.value));
  if (scale == 0) scale = 1;
  out.push_back({pairs.front()});
  for (size_t i = 1; i < pairs.size(); ++i) {
    const double gap = pairs[i].value - pairs[i - 1].value;
    if (gap <= kJoin * scale) {
      out.back().push_back(pairs[i]);
    } else if (gap >= kSeparate * scale) {
      out.push_back({pairs[i]});
    } else {
      return false;
    }
  }
  return true;
}

struct BlockEigen {
  std::vector<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>> es;
  std::vector<EigenPair> pairs;
};

BlockEigen eigen_blocks(const std::vector<Eigen::MatrixXd>& x) {
  BlockEigen be;
  be.es.resize(x.size());
  for (size_t k = 0; k < x.size(); ++k) {
    if (x[k].rows() == 0) continue;
    be.es[k].compute(x[k]);
    for (Index a = 0; a < x[k].rows(); ++a)
      be.pairs.push_back({be.es[k].eigenvalues()[a], static_cast<int>(k), a});
  }
  std::sort(be.pairs.begin(), be.pairs.end(), [](const EigenPair& p, const EigenPair& q) {
    if (p.value != q.value) return p.value < q.value;
    if (p.block != q.block) return p.block < q.block;
    return p.col < q.col;
  });
  return be;
}

// Per block, orthonormal columns spanning the compressed eigenvectors of one cluster.
std::vector<Eigen::MatrixXd> cluster_columns(const Compressed& c, const BlockEigen& be,
                                             const std::vector<EigenPair>& cluster) {
  std::vector<Eigen::MatrixXd> w(c.num_blocks());
  std::vector<std::vector<Index>> cols(c.num_blocks());
  for (const auto& p : cluster) cols[p.block].push_back(p.col);
  for (int k = 0; k < c.num_blocks(); ++k) {
    w[k].resize(c.u[k].cols(), static_cast<Index>(cols[k].size()));
    for (size_t a = 0; a < cols[k].size(); ++a)
      w[k].col(static_cast<Index>(a)) = be.es[k].eigenvectors().col(cols[k][a]);
  }
  return w;
}

double commutator_norm(const std::vector<Eigen::MatrixXd>& x, const std::vector<Eigen::MatrixXd>& y) {
  double s = 0;
  for (size_t k = 0; k < x.size(); ++k) {
    if (x[k].rows() == 0) continue;
    s += (x[k] * y[k] - y[k] * x[k]).squaredNorm();
  }
  return std::sqrt(s);
}

double blocks_norm(const std::vector<Eigen::MatrixXd>& x) {
  double s = 0;
  for (const auto& b : x) s += b.squaredNorm();
  return std::sqrt(s);
}

// Coefficients (orthonormal columns) of the center: elements commuting with
// every element of the subspace.
Eigen::MatrixXd center_coefficients(const Compressed& c, std::uint64_t seed) {
  const Index d = static_cast<Index>(c.elems.size());
  Index rows_per_test = 0;
  for (const auto& u : c.u) rows_per_test += u.cols() * (u.cols() - 1) / 2;
  if (rows_per_test == 0) return Eigen::MatrixXd::Identity(d, d);

  Rng rng(seed, kStreamCenter);
  Eigen::MatrixXd r(0, d);
  auto add_test = [&](const std::vector<Eigen::MatrixXd>& x) {
    Eigen::MatrixXd k(rows_per_test, d);
    for (Index a = 0; a < d; ++a) {
      Index row = 0;
      for (int b = 0; b < c.num_blocks(); ++b) {
        const Index n = c.u[b].cols();
        if (n < 2) continue;
        Eigen::MatrixXd m = c.elems[a][b] * x[b];
        for (Index j = 1; j < n; ++j)
          for (Index i = 0; i < j; ++i) k(row++, a) = m(i, j) - m(j, i);
      }
    }
    Eigen::MatrixXd stack(r.rows() + k.rows(), d);
    stack << r, k;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(stack);
    const Index keep = std::min<Index>(stack.rows(), d);
    r = qr.matrixQR().topRows(keep).triangularView<Eigen::Upper>();
  };
  auto generic = [&]() {
    Eigen::VectorXd g = rng.normal_vector(d);
    g /= g.norm();
    return c.combine(g);
  };

  for (int t = 0; t < 4; ++t) add_test(generic());
  for (int round = 0; round < 6; ++round) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(r, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    // Basis and test elements have unit norm, so singular values are O(1).
    const double top = sv.size() > 0 ? sv[0] : 0.0;
    Index rank = 0;
    for (Index i = 0; i < sv.size(); ++i)
      if (sv[i] > 1e-8 * std::max(top, 1.0)) ++rank;
    Eigen::MatrixXd z = svd.matrixV().rightCols(d - rank);
    if (z.cols() == 0) return z;
    // Fresh generic elements must commute with every candidate.
    bool ok = true;
    std::vector<std::vector<Eigen::MatrixXd>> failing;
    for (int t = 0; t < 4; ++t) {
      auto x = generic();
      for (Index j = 0; j < z.cols(); ++j) {
        auto zj = c.combine(z.col(j));
        if (commutator_norm(zj, x) > 1e-6 * blocks_norm(zj) * blocks_norm(x)) {
          ok = false;
          failing.push_back(x);
          break;
        }
      }
    }
    if (ok) return z;
    for (const auto& x : failing) add_test(x);
  }
  throw NumericalError("center computation did not stabilize");
}

SymBlockMatrix expand(const Compressed& c, const std::vector<Eigen::MatrixXd>& x) {
  SymBlockMatrix out(c.structure);
  for (int k = 0; k < c.num_blocks(); ++k) {
    if (x[k].rows() == 0) continue;
    out.block(k) = c.u[k] * x[k] * c.u[k].transpose();
  }
  out.symmetrize();
  return out;
}

// Subspaces spanned by single svec coordinates decompose by index classes.
bool decompose_coordinate(const SubspaceBasis& s, IdealDecomposition& out) {
  const BlockStructure& st = s.structure();
  const Eigen::MatrixXd& q = s.matrix();
  std::vector<Index> pos(s.dim());
  for (int a = 0; a < s.dim(); ++a) {
    Index at = -1;
    for (Index p = 0; p < q.rows(); ++p) {
      const double v = std::abs(q(p, a));
      if (v > 1 - 1e-12) {
        if (at >= 0) return false;
        at = p;
      } else if (v > 1e-12) {
        return false;
      }
    }
    if (at < 0) return false;
    pos[a] = at;
  }
  std::vector<Index> offsets(st.num_blocks() + 1, 0);
  for (int k = 0; k < st.num_blocks(); ++k) offsets[k + 1] = offsets[k] + st.order(k);
  detail::DisjointSets dsu(static_cast<size_t>(offsets.back()));
  std::vector<char> has_diag(static_cast<size_t>(offsets.back()), 0);
  for (Index p : pos) {
    auto e = st.entry(p);
    dsu.unite(static_cast<size_t>(offsets[e.block] + e.i), static_cast<size_t>(offsets[e.block] + e.j));
    if (e.i == e.j) has_diag[static_cast<size_t>(offsets[e.block] + e.i)] = 1;
  }
  std::vector<std::vector<int>> members(static_cast<size_t>(offsets.back()));
  for (int a = 0; a < s.dim(); ++a) {
    auto e = st.entry(pos[a]);
    members[dsu.find(static_cast<size_t>(offsets[e.block] + e.i))].push_back(a);
  }
  std::vector<Ideal> ideals;
  for (int k = 0; k < st.num_blocks(); ++k) {
    for (int i = 0; i < st.order(k); ++i) {
      const size_t g = static_cast<size_t>(offsets[k] + i);
      if (dsu.find(g) != g || members[g].empty()) continue;
      std::vector<int> idx;
      for (int j = 0; j < st.order(k); ++j)
        if (dsu.find(static_cast<size_t>(offsets[k] + j)) == g) idx.push_back(j);
      const long r = static_cast<long>(idx.size());
      if (static_cast<long>(members[g].size()) != r * (r + 1) / 2) return false;
      Ideal ideal;
      Eigen::MatrixXd qi = Eigen::MatrixXd::Zero(st.dim(), static_cast<Index>(members[g].size()));
      for (size_t a = 0; a < members[g].size(); ++a) qi(pos[members[g][a]], static_cast<Index>(a)) = 1.0;
      ideal.basis = SubspaceBasis(st, std::move(qi), s.tol());
      ideal.unit = SymBlockMatrix(st);
      for (int j : idx) {
        if (!has_diag[static_cast<size_t>(offsets[k] + j)]) return false;
        ideal.unit.set(k, j, j, 1.0);
      }
      ideal.dim = static_cast<int>(members[g].size());
      ideal.rank = static_cast<int>(r);
      ideal.iso_class = IsoClass::kRealSym;
      ideals.push_back(std::move(ideal));
    }
  }
  out.ideals = std::move(ideals);
  return true;
}

Index first_support(const SymBlockMatrix& x) {
  Eigen::VectorXd v = svec(x);
  const double top = v.cwiseAbs().maxCoeff();
  for (Index p = 0; p < v.size(); ++p)
    if (std::abs(v[p]) > 1e-6 * top) return p;
  return v.size();
}

void sort_ideals(std::vector<Ideal>& ideals) {
  std::vector<std::pair<Index, size_t>> key;
  for (size_t i = 0; i < ideals.size(); ++i) key.push_back({first_support(ideals[i].unit), i});
  std::vector<size_t> order(ideals.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<Index> first(ideals.size());
  for (const auto& [f, i] : key) first[i] = f;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (ideals[a].rank != ideals[b].rank) return ideals[a].rank > ideals[b].rank;
    if (ideals[a].dim != ideals[b].dim) return ideals[a].dim > ideals[b].dim;
    return first[a] < first[b];
  });
  std::vector<Ideal> sorted;
  for (size_t i : order) sorted.push_back(std::move(ideals[i]));
  ideals = std::move(sorted);
}

// Compression of a single ideal onto the range of its unit.
Compressed compress_ideal(const Ideal& ideal) {
  const BlockStructure& st = ideal.basis.structure();
  Compressed c;
  c.structure = st;
  c.u.resize(st.num_blocks());
  for (int k = 0; k < st.num_blocks(); ++k) {
    if (st.order(k) == 0) {
      c.u[k].resize(0, 0);
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ideal.unit.block(k));
    std::vector<Index> keep;
    for (Index a = 0; a < es.eigenvalues().size(); ++a)
      if (es.eigenvalues()[a] > 0.5) keep.push_back(a);
    c.u[k].resize(st.order(k), static_cast<Index>(keep.size()));
    for (size_t a = 0; a < keep.size(); ++a) c.u[k].col(static_cast<Index>(a)) = es.eigenvectors().col(keep[a]);
  }
  c.elems.resize(ideal.basis.dim());
  for (int a = 0; a < ideal.basis.dim(); ++a) {
    SymBlockMatrix b = ideal.basis.element(a);
    c.elems[a].resize(st.num_blocks());
    for (int k = 0; k < st.num_blocks(); ++k) c.elems[a][k] = c.u[k].transpose() * b.block(k) * c.u[k];
  }
  return c;
}

// Spectral idempotents of a generic element of the ideal, by increasing eigenvalue.
std::vector<SymBlockMatrix> spectral_idempotents(const Ideal& ideal, const Compressed& c, Rng& rng) {
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    auto x = c.combine(rng.normal_vector(ideal.basis.dim()));
    BlockEigen be = eigen_blocks(x);
    std::vector<std::vector<EigenPair>> clusters;
    if (!cluster_sorted(be.pairs, clusters)) continue;
    std::vector<SymBlockMatrix> out;
    for (const auto& cl : clusters) {
      auto w = cluster_columns(c, be, cl);
      std::vector<Eigen::MatrixXd> p(w.size());
      for (size_t k = 0; k < w.size(); ++k) p[k] = w[k] * w[k].transpose();
      out.push_back(expand(c, p));
    }
    return out;
  }
  throw NumericalError("eigenvalues of a generic element stayed ambiguous");
}

int krylov_degree(const Ideal& ideal, const Compressed& c, Rng& rng) {
  auto x = c.combine(rng.normal_vector(ideal.basis.dim()));
  double top = 0;
  for (const auto& b : x)
    if (b.rows() > 0) top = std::max(top, b.cwiseAbs().rowwise().sum().maxCoeff());
  if (top == 0) return 1;
  for (auto& b : x) b /= top;
  std::vector<std::vector<Eigen::MatrixXd>> q;
  std::vector<Eigen::MatrixXd> e(x.size());
  for (size_t k = 0; k < x.size(); ++k) e[k] = Eigen::MatrixXd::Identity(x[k].rows(), x[k].cols());
  const double en = blocks_norm(e);
  for (auto& b : e) b /= en;
  q.push_back(e);
  auto dot = [](const std::vector<Eigen::MatrixXd>& a, const std::vector<Eigen::MatrixXd>& b) {
    double s = 0;
    for (size_t k = 0; k < a.size(); ++k) s += (a[k].array() * b[k].array()).sum();
    return s;
  };
  while (static_cast<int>(q.size()) < ideal.dim) {
    std::vector<Eigen::MatrixXd> v(x.size());
    for (size_t k = 0; k < x.size(); ++k) v[k] = 0.5 * (x[k] * q.back()[k] + q.back()[k] * x[k]);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& qq : q) {
        const double h = dot(qq, v);
        for (size_t k = 0; k < v.size(); ++k) v[k] -= h * qq[k];
      }
    const double n = blocks_norm(v);
    if (n <= 1e-8) break;
    for (auto& b : v) b /= n;
    q.push_back(std::move(v));
  }
  return static_cast<int>(q.size());
}

}  // namespace

std::string_view to_string(IsoClass c) {
  switch (c) {
    case IsoClass::kRealSym:
      return "REAL_SYM";
    case IsoClass::kComplexHerm:
      return "COMPLEX_HERM";
    case IsoClass::kQuaternionHerm:
      return "QUATERNION_HERM";
    case IsoClass::kSpin:
      return "SPIN";
    case IsoClass::kUnclassified:
      break;
  }
  return "UNCLASSIFIED";
}

RankTuple::RankTuple(std::vector<int> r) : ranks(std::move(r)) {
  std::sort(ranks.begin(), ranks.end(), std::greater<int>());
}

int RankTuple::sum() const { return std::accumulate(ranks.begin(), ranks.end(), 0); }

SymBlockMatrix JordanMap::apply(const SymBlockMatrix& xhat) const {
  require_same(reduced, xhat.structure());
  return smat(ambient, phi * svec(xhat));
}

SymBlockMatrix JordanMap::adjoint(const SymBlockMatrix& x) const {
  require_same(ambient, x.structure());
  return smat(reduced, phi.transpose() * svec(x));
}

SymBlockMatrix JordanMap::preimage(const SymBlockMatrix& x) const {
  require_same(ambient, x.structure());
  Eigen::VectorXd v = phi.transpose() * svec(x);
  return smat(reduced, v.cwiseQuotient(gram_diag));
}

RankTuple IdealDecomposition::ranks() const {
  std::vector<int> r;
  for (const auto& i : ideals) r.push_back(i.rank);
  return RankTuple(std::move(r));
}

bool IdealDecomposition::all_real() const {
  return std::all_of(ideals.begin(), ideals.end(),
                     [](const Ideal& i) { return i.iso_class == IsoClass::kRealSym; });
}

IsoClass classify_ideal(int dim, int rank) {
  if (rank <= 0) return IsoClass::kUnclassified;
  const long r = rank;
  if (dim == r * (r + 1) / 2) return IsoClass::kRealSym;
  if (dim == r * r) return IsoClass::kComplexHerm;
  if (dim == r * (2 * r - 1)) return IsoClass::kQuaternionHerm;
  if (rank == 2 && dim >= 3) return IsoClass::kSpin;
  return IsoClass::kUnclassified;
}

int ideal_rank(const Ideal& ideal, std::uint64_t seed, double) {
  if (ideal.dim <= 1) return ideal.dim;
  Compressed c = compress_ideal(ideal);
  for (int attempt = 0; attempt < 3; ++attempt) {
    Rng rng(seed + static_cast<std::uint64_t>(attempt), kStreamRank);
    const int distinct = static_cast<int>(spectral_idempotents(ideal, c, rng).size());
    const int degree = krylov_degree(ideal, c, rng);
    if (distinct == degree) return distinct;
  }
  throw NumericalError("rank estimates disagree");
}

IdealDecomposition decompose_ideals(const SubspaceBasis& s, std::uint64_t seed, double tol) {
  IdealDecomposition out;
  out.subspace = s;
  if (s.dim() == 0) return out;
  if (decompose_coordinate(s, out)) {
    sort_ideals(out.ideals);
    return out;
  }

  const BlockStructure& st = s.structure();
  Compressed c = compress(s, seed);
  Eigen::MatrixXd z = center_coefficients(c, seed);
  if (z.cols() == 0) throw NumericalError("subspace has an empty center");

  const double drop = std::max(tol, 1e-8);
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    Rng rng(seed + static_cast<std::uint64_t>(attempt), kStreamSplit);
    auto x = c.combine(z * rng.normal_vector(z.cols()));
    BlockEigen be = eigen_blocks(x);
    std::vector<std::vector<EigenPair>> clusters;
    if (!cluster_sorted(be.pairs, clusters)) continue;
    std::vector<Ideal> ideals;
    int total = 0;
    for (const auto& cl : clusters) {
      auto w = cluster_columns(c, be, cl);
      std::vector<Eigen::MatrixXd> uw(w.size());
      std::vector<Eigen::MatrixXd> proj(w.size());
      for (int k = 0; k < c.num_blocks(); ++k) {
        uw[k] = c.u[k] * w[k];
        proj[k] = w[k] * w[k].transpose();
      }
      std::vector<Eigen::VectorXd> parts;
      parts.reserve(c.elems.size());
      for (const auto& b : c.elems) {
        SymBlockMatrix m(st);
        for (int k = 0; k < c.num_blocks(); ++k) {
          if (uw[k].cols() == 0) continue;
          m.block(k) = uw[k] * (w[k].transpose() * b[k] * w[k]) * uw[k].transpose();
        }
        m.symmetrize();
        parts.push_back(svec(m));
      }
      Ideal ideal;
      ideal.basis = orthonormalize_svec(st, parts, drop);
      ideal.dim = ideal.basis.dim();
      ideal.unit = expand(c, proj);
      total += ideal.dim;
      ideals.push_back(std::move(ideal));
    }
    if (total != s.dim()) continue;
    for (size_t i = 0; i < ideals.size(); ++i) {
      ideals[i].rank = ideal_rank(ideals[i], seed + i, tol);
      ideals[i].iso_class = classify_ideal(ideals[i]);
    }
    sort_ideals(ideals);
    out.ideals = std::move(ideals);
    return out;
  }
  throw NumericalError("could not split the subspace into simple ideals");
}

std::optional<JordanMap> construct_isomorphism(IdealDecomposition& decomp, std::uint64_t seed, double) {
  if (!decomp.all_real()) return std::nullopt;
  const BlockStructure& st = decomp.subspace.structure();
  std::vector<int> orders;
  for (const auto& i : decomp.ideals) orders.push_back(i.rank);
  JordanMap map;
  map.ambient = st;
  map.reduced = BlockStructure(orders);
  map.phi = Eigen::MatrixXd::Zero(st.dim(), map.reduced.dim());
  map.gram_diag = Eigen::VectorXd::Zero(map.reduced.dim());

  for (size_t b = 0; b < decomp.ideals.size(); ++b) {
    Ideal& ideal = decomp.ideals[b];
    const int r = ideal.rank;
    const int blk = static_cast<int>(b);
    if (r == 1) {
      ideal.frame = {ideal.unit};
    } else {
      Compressed c = compress_ideal(ideal);
      Rng rng(seed + b, kStreamFrame);
      ideal.frame = spectral_idempotents(ideal, c, rng);
      if (static_cast<int>(ideal.frame.size()) != r) throw ClassificationError("frame size differs from rank");
    }
    double tr = 0;
    for (int k = 0; k < st.num_blocks(); ++k) tr += ideal.frame[0].block(k).trace();
    const double mult = std::round(tr);
    if (mult < 1) throw ClassificationError("primitive idempotent with zero trace");
    for (const auto& e : ideal.frame) {
      double t = 0;
      for (int k = 0; k < st.num_blocks(); ++k) t += e.block(k).trace();
      if (std::abs(t - mult) > 1e-6 * mult) throw ClassificationError("primitive idempotents differ in trace");
    }
    map.multiplicity.push_back(static_cast<int>(mult));

    std::vector<SymBlockMatrix> w1(r);
    for (int k = 1; k < r; ++k) {
      const SymBlockMatrix& e1 = ideal.frame[0];
      const SymBlockMatrix& ek = ideal.frame[k];
      SymBlockMatrix best(st);
      double best_norm = -1;
      for (int a = 0; a < ideal.basis.dim(); ++a) {
        SymBlockMatrix x = ideal.basis.element(a);
        SymBlockMatrix v(st);
        for (int q = 0; q < st.num_blocks(); ++q) {
          Eigen::MatrixXd t = e1.block(q) * x.block(q) * ek.block(q);
          v.block(q) = t + t.transpose();
        }
        const double n = v.norm();
        if (n > best_norm) {
          best_norm = n;
          best = std::move(v);
        }
      }
      if (best_norm <= 1e-8) throw ClassificationError("empty Peirce space");
      best *= std::sqrt(2.0 * mult) / best_norm;
      Eigen::VectorXd sv = svec(best);
      const Index first = first_support(best);
      if (first < sv.size() && sv[first] < 0) best *= -1.0;
      SymBlockMatrix target = e1 + ek;
      if ((square(best) - target).norm() > 1e-6 * target.norm())
        throw ClassificationError("Peirce generator does not square to the idempotent sum");
      w1[k] = std::move(best);
    }
    for (int j = 0; j < r; ++j) {
      map.phi.col(map.reduced.svec_index(blk, j, j)) = svec(ideal.frame[j]);
      for (int i = 0; i < j; ++i) {
        SymBlockMatrix w = i == 0 ? w1[j] : anticommutator(w1[i], w1[j]);
        map.phi.col(map.reduced.svec_index(blk, i, j)) = svec(w) / std::sqrt(2.0);
      }
    }
    for (int j = 0; j < r; ++j)
      for (int i = 0; i <= j; ++i) map.gram_diag[map.reduced.svec_index(blk, i, j)] = mult;
  }
  decomp.phi = map;
  return map;
}

Eigen::MatrixXd multiplication_operator(const SubspaceBasis& s, const SymBlockMatrix& x) {
  const int d = s.dim();
  Eigen::MatrixXd prod(s.structure().dim(), d);
  for (int b = 0; b < d; ++b) prod.col(b) = svec(jordan_product(x, s.element(b)));
  return s.matrix().transpose() * prod;
}

bool cone_membership(const SubspaceBasis& s, const SymBlockMatrix& x, double tol) {
  require_same(s.structure(), x.structure());
  const double scale = std::max(1.0, x.norm());
  if (s.residual(svec(x)) > tol * scale) throw DomainError("element does not lie in the subspace");
  if (s.dim() == 0) return true;
  Eigen::MatrixXd l = multiplication_operator(s, x);
  l = 0.5 * (l + l.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0] >= -tol * scale;
}

bool weakly_majorizes(const RankTuple& x, const RankTuple& y) {
  const size_t len = std::max(x.ranks.size(), y.ranks.size());
  long sx = 0;
  long sy = 0;
  for (size_t l = 0; l < len; ++l) {
    if (l < x.ranks.size()) sx += x.ranks[l];
    if (l < y.ranks.size()) sy += y.ranks[l];
    if (sx < sy) return false;
  }
  return true;
}

}  // namespace jred
