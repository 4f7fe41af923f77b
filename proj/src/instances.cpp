#include "jred/instances.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

#include "dsu.hpp"
#include "jred/error.hpp"
#include "jred/random.hpp"

namespace jred {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

int parse_int(const std::string& s) {
  try {
    size_t used = 0;
    int v = std::stoi(s, &used);
    if (used != s.size()) throw DomainError("bad integer '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw DomainError("bad integer '" + s + "'");
  }
}

// Orbits of unordered pairs {i, j} of [n] under a permutation group; returns a
// label per svec position of an order-n block.
std::vector<int> pair_orbits(int n, const std::vector<std::vector<int>>& gens) {
  BlockStructure s({n});
  detail::DisjointSets dsu(static_cast<size_t>(s.dim()));
  for (const auto& g : gens)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i <= j; ++i)
        dsu.unite(static_cast<size_t>(s.svec_index(0, i, j)), static_cast<size_t>(s.svec_index(0, g[i], g[j])));
  std::vector<int> label(static_cast<size_t>(s.dim()));
  for (Index p = 0; p < s.dim(); ++p) label[p] = static_cast<int>(dsu.find(static_cast<size_t>(p)));
  return label;
}

// Random matrix constant on the given orbits of block k; each orbit is
// nonzero with probability `density`.
void add_invariant(SymBlockMatrix& x, int k, int offset, int n, const std::vector<int>& label, double density,
                   Rng& rng) {
  BlockStructure s({n});
  std::vector<double> value(label.size(), 0.0);
  for (size_t p = 0; p < label.size(); ++p)
    if (label[p] == static_cast<int>(p) && rng.uniform() < density) value[p] = rng.normal();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i) {
      const double v = value[label[s.svec_index(0, i, j)]];
      if (v != 0.0) x.set(k, offset + i, offset + j, v);
    }
}

// Makes x positive definite by adding a multiple of the identity.
void shift_definite(SymBlockMatrix& x, double margin) {
  const double lo = min_eigenvalue(x);
  SymBlockMatrix id = SymBlockMatrix::identity(x.structure());
  x += (margin - std::min(lo, 0.0)) * id;
}

// Fills b and C from planted x0, y0, s0.
void finish_planted(PlantedInstance& inst, Rng& rng) {
  ConicProgram& p = inst.program;
  const int m = p.num_constraints();
  p.b.assign(m, 0.0);
  for (int i = 0; i < m; ++i) p.b[i] = p.a[i].inner(inst.x0);
  inst.y0 = rng.normal_vector(m);
  SymBlockMatrix c = inst.s0;
  for (int i = 0; i < m; ++i) c += inst.y0[i] * p.a[i].dense(p.structure);
  p.c = SparseSymMatrix::from_dense(c, 1e-15);
}

PlantedInstance permutation_instance(const BlockStructure& s, const std::vector<std::vector<std::vector<int>>>& gens,
                                     int m, double density, Rng& rng) {
  PlantedInstance inst;
  ConicProgram& p = inst.program;
  p.structure = s;
  std::vector<std::vector<int>> labels;
  for (int k = 0; k < s.num_blocks(); ++k) labels.push_back(pair_orbits(s.order(k), gens[k]));
  auto invariant = [&](double dens) {
    SymBlockMatrix x(s);
    for (int k = 0; k < s.num_blocks(); ++k) add_invariant(x, k, 0, s.order(k), labels[k], dens, rng);
    return x;
  };
  for (int i = 0; i < m; ++i) {
    SymBlockMatrix a = invariant(density);
    if (a.max_abs() == 0.0) a = invariant(1.0);
    p.a.push_back(SparseSymMatrix::from_dense(a));
  }
  inst.x0 = 0.3 * invariant(1.0);
  shift_definite(inst.x0, 0.5);
  inst.s0 = 0.3 * invariant(1.0);
  shift_definite(inst.s0, 0.5);
  finish_planted(inst, rng);
  return inst;
}

std::vector<int> cycle_permutation(const std::vector<int>& support, int n) {
  std::vector<int> g(n);
  for (int i = 0; i < n; ++i) g[i] = i;
  for (size_t a = 0; a < support.size(); ++a) g[support[a]] = support[(a + 1) % support.size()];
  return g;
}

}  // namespace

ConicProgram theta_sdp(const HammingGraphSpec& spec) {
  if (spec.q < 1 || spec.q > 16) throw DomainError("hamming label length out of range");
  for (int d : spec.distances)
    if (d < 1 || d > spec.q) throw DomainError("hamming distance out of range");
  const int n = 1 << spec.q;
  ConicProgram p;
  std::ostringstream name;
  name << "hamming_" << spec.q;
  for (int d : spec.distances) name << "_" << d;
  p.name = name.str();
  p.structure = BlockStructure({n});
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i) p.c.add(0, i, j, -1.0);
  p.c.normalize();
  SparseSymMatrix trace;
  for (int i = 0; i < n; ++i) trace.add(0, i, i, 1.0);
  p.a.push_back(trace);
  p.b.push_back(1.0);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      const int dist = std::popcount(static_cast<unsigned>(u ^ v));
      if (std::find(spec.distances.begin(), spec.distances.end(), dist) == spec.distances.end()) continue;
      SparseSymMatrix e;
      e.add(0, u, v, 1.0);
      p.a.push_back(e);
      p.b.push_back(0.0);
    }
  return p;
}

Eigen::MatrixXd cprank_z() {
  Eigen::MatrixXd z(3, 3);
  z << 4, 0, 1, 0, 4, 1, 1, 1, 3;
  return z;
}

ConicProgram cprank_sdp(const Eigen::MatrixXd& w) {
  const int n = static_cast<int>(w.rows());
  if (w.cols() != n || !w.isApprox(w.transpose(), 0.0)) throw DomainError("cp-rank data must be symmetric");
  if ((w.array() < 0).any()) throw DomainError("cp-rank data must be entrywise nonnegative");
  const int nn = n * n;
  std::vector<int> orders = {nn + 1, nn};
  for (int a = 0; a < nn; ++a) orders.push_back(1);
  ConicProgram p;
  p.name = "cprank_" + std::to_string(n);
  p.structure = BlockStructure(orders);
  auto idx = [n](int i, int j) { return i + n * j; };  // column-major vec

  // Orbits of the positions (a, b), a <= b, of X under X_{ij,kl} = X_{il,kj}.
  BlockStructure xs({nn});
  detail::DisjointSets dsu(static_cast<size_t>(xs.dim()));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          dsu.unite(static_cast<size_t>(xs.svec_index(0, idx(i, j), idx(k, l))),
                    static_cast<size_t>(xs.svec_index(0, idx(i, l), idx(k, j))));
  std::vector<int> param(static_cast<size_t>(xs.dim()), -1);
  std::vector<std::vector<std::pair<int, int>>> members;
  for (int b = 0; b < nn; ++b)
    for (int a = 0; a <= b; ++a) {
      const size_t root = dsu.find(static_cast<size_t>(xs.svec_index(0, a, b)));
      if (param[root] < 0) {
        param[root] = static_cast<int>(members.size());
        members.emplace_back();
      }
      members[param[root]].push_back({a, b});
    }

  SparseSymMatrix ft;
  ft.add(0, 0, 0, 1.0);
  p.a.push_back(ft);
  p.b.push_back(1.0);
  for (const auto& cls : members) {
    SparseSymMatrix f;
    for (const auto& [a, b] : cls) {
      f.add(0, 1 + a, 1 + b, 1.0);
      f.add(1, a, b, -1.0);
      if (a == b) f.add(2 + a, 0, 0, -1.0);
    }
    f.normalize();
    p.a.push_back(f);
    p.b.push_back(0.0);
  }

  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int a = idx(i, j);
      if (w(i, j) != 0.0) {
        p.c.add(0, 0, 1 + a, w(i, j));
        p.c.add(2 + a, 0, 0, w(i, j) * w(i, j));
      }
      for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k) {
          const int b = idx(k, l);
          if (b < a) continue;
          const double v = w(i, k) * w(j, l);
          if (v != 0.0) p.c.add(1, a, b, v);
        }
    }
  p.c.normalize();
  return p;
}

std::vector<std::vector<int>> group_generators(SymmetryGroup group, int n) {
  std::vector<std::vector<int>> gens;
  if (group == SymmetryGroup::kCyclic || group == SymmetryGroup::kDihedral) {
    std::vector<int> rot(n);
    for (int i = 0; i < n; ++i) rot[i] = (i + 1) % n;
    gens.push_back(rot);
  }
  if (group == SymmetryGroup::kDihedral) {
    std::vector<int> ref(n);
    for (int i = 0; i < n; ++i) ref[i] = (n - i) % n;
    gens.push_back(ref);
  }
  return gens;
}

PlantedInstance planted_symmetry_sdp(int n, SymmetryGroup group, std::uint64_t seed, int m) {
  if (n < 1 || n > 64) throw DomainError("planted instance order out of range");
  Rng rng(seed, 0x70);
  BlockStructure s({n});
  PlantedInstance inst;
  if (group != SymmetryGroup::kBlockCopy) {
    inst = permutation_instance(s, {group_generators(group, n)}, m, 0.6, rng);
  } else {
    if (n < 2) throw DomainError("block copy needs order at least 2");
    const int h = n / 2;
    auto tied = [&]() {
      SymBlockMatrix x(s);
      for (int j = 0; j < h; ++j)
        for (int i = 0; i <= j; ++i) {
          const double v = rng.normal();
          x.set(0, i, j, v);
          x.set(0, h + i, h + j, v);
        }
      if (n % 2 == 1) x.set(0, n - 1, n - 1, rng.normal());
      return x;
    };
    ConicProgram& p = inst.program;
    p.structure = s;
    for (int i = 0; i < m; ++i) p.a.push_back(SparseSymMatrix::from_dense(tied()));
    inst.x0 = 0.3 * tied();
    shift_definite(inst.x0, 0.5);
    inst.s0 = 0.3 * tied();
    shift_definite(inst.s0, 0.5);
    finish_planted(inst, rng);
  }
  static const char* names[] = {"trivial", "cyclic", "dihedral", "blockcopy"};
  inst.program.name = std::string("planted_") + names[static_cast<int>(group)] + "_" + std::to_string(n);
  return inst;
}

PlantedInstance random_sdp(std::uint64_t seed, int max_order, int max_constraints) {
  Rng rng(seed, 0x71);
  const int total = 2 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(std::max(1, max_order - 1)));
  std::vector<int> orders;
  if (total >= 4 && rng.uniform() < 0.4) {
    const int first = 1 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(total - 1));
    orders = {first, total - first};
  } else {
    orders = {total};
  }
  BlockStructure s(orders);
  std::vector<std::vector<std::vector<int>>> gens(orders.size());
  for (size_t k = 0; k < orders.size(); ++k) {
    const int n = orders[k];
    // A random cycle on a random subset of the indices.
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng.engine());
    const int len = 1 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(n));
    perm.resize(len);
    if (len > 1) gens[k].push_back(cycle_permutation(perm, n));
  }
  const int m = 1 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(max_constraints));
  PlantedInstance inst = permutation_instance(s, gens, m, 0.4, rng);
  inst.program.name = "random_" + std::to_string(seed);
  return inst;
}

PlantedInstance c4_lp(std::uint64_t seed) {
  Rng rng(seed, 0x72);
  const int kRot = 4;
  const int kOrb = 3;
  BlockStructure s(std::vector<int>(kRot * kOrb, 1));
  auto var = [&](int r, int o) { return ((r % kRot + kRot) % kRot) * kOrb + o; };
  PlantedInstance inst;
  ConicProgram& p = inst.program;
  p.name = "lp_c4";
  p.structure = s;
  // coef[c][d][o]: weight of variable (r + d, o) in constraint (r, c).
  std::vector<std::vector<std::vector<double>>> coef(kOrb, std::vector<std::vector<double>>(kRot, std::vector<double>(kOrb)));
  for (auto& c : coef)
    for (auto& d : c)
      for (auto& v : d) v = rng.uniform() < 0.5 ? 0.0 : std::floor(rng.uniform(1.0, 5.0));
  for (int c = 0; c < kOrb; ++c) coef[c][0][c] = 1.0;
  for (int r = 0; r < kRot; ++r)
    for (int c = 0; c < kOrb; ++c) {
      SparseSymMatrix a;
      for (int d = 0; d < kRot; ++d)
        for (int o = 0; o < kOrb; ++o)
          if (coef[c][d][o] != 0.0) a.add(var(r + d, o), 0, 0, coef[c][d][o]);
      a.normalize();
      p.a.push_back(a);
    }
  std::vector<double> xo = {1.0, 2.0, 0.5};
  std::vector<double> so = {1.5, 0.5, 1.0};
  inst.x0 = SymBlockMatrix(s);
  inst.s0 = SymBlockMatrix(s);
  for (int r = 0; r < kRot; ++r)
    for (int o = 0; o < kOrb; ++o) {
      inst.x0.set(var(r, o), 0, 0, xo[o]);
      inst.s0.set(var(r, o), 0, 0, so[o]);
    }
  p.b.assign(p.a.size(), 0.0);
  for (size_t i = 0; i < p.a.size(); ++i) p.b[i] = p.a[i].inner(inst.x0);
  // Dual multipliers constant on constraint orbits keep C invariant.
  std::vector<double> yo = {rng.normal(), rng.normal(), rng.normal()};
  inst.y0 = Eigen::VectorXd(static_cast<Index>(p.a.size()));
  for (int r = 0; r < kRot; ++r)
    for (int c = 0; c < kOrb; ++c) inst.y0[r * kOrb + c] = yo[c];
  SymBlockMatrix c = inst.s0;
  for (size_t i = 0; i < p.a.size(); ++i) c += inst.y0[static_cast<Index>(i)] * p.a[i].dense(s);
  p.c = SparseSymMatrix::from_dense(c, 1e-15);
  return inst;
}

ConicProgram generate_instance(const std::string& spec, std::uint64_t seed) {
  const auto parts = split(spec, ':');
  if (parts.empty()) throw DomainError("empty instance name");
  const std::string& kind = parts[0];
  if (kind == "hamming" && parts.size() == 3) {
    HammingGraphSpec h;
    h.q = parse_int(parts[1]);
    for (const auto& d : split(parts[2], ',')) h.distances.push_back(parse_int(d));
    return theta_sdp(h);
  }
  if (kind == "cprank" && parts.size() == 2) {
    Eigen::MatrixXd z = cprank_z();
    Eigen::MatrixXd w;
    if (parts[1] == "Z") {
      w = z;
    } else if (parts[1] == "ZxZ") {
      w = Eigen::kroneckerProduct(z, z);
    } else if (parts[1] == "ZxZxZ") {
      Eigen::MatrixXd zz = Eigen::kroneckerProduct(z, z);
      w = Eigen::kroneckerProduct(zz, z);
    } else {
      throw DomainError("unknown cp-rank matrix '" + parts[1] + "'");
    }
    ConicProgram p = cprank_sdp(w);
    p.name = "cprank_" + parts[1];
    return p;
  }
  if (kind == "planted" && parts.size() == 3) {
    SymmetryGroup g;
    if (parts[1] == "trivial")
      g = SymmetryGroup::kTrivial;
    else if (parts[1] == "cyclic")
      g = SymmetryGroup::kCyclic;
    else if (parts[1] == "dihedral")
      g = SymmetryGroup::kDihedral;
    else if (parts[1] == "blockcopy")
      g = SymmetryGroup::kBlockCopy;
    else
      throw DomainError("unknown group '" + parts[1] + "'");
    return planted_symmetry_sdp(parse_int(parts[2]), g, seed).program;
  }
  if (kind == "random" && parts.size() == 2) return random_sdp(static_cast<std::uint64_t>(parse_int(parts[1]))).program;
  if (kind == "lp" && parts.size() == 2 && parts[1] == "c4") return c4_lp(seed).program;
  throw DomainError("unknown instance '" + spec + "'");
}

std::vector<std::string> bundled_instances() {
  return {"hamming:2:2",        "hamming:4:3,4",      "hamming:7:5,6",  "cprank:Z",
          "planted:cyclic:4",   "planted:cyclic:6",   "planted:dihedral:6", "planted:blockcopy:5",
          "planted:trivial:4",  "random:1",           "random:2",       "lp:c4"};
}

}  // namespace jred
