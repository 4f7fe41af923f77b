#include "jred/combinat.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "dsu.hpp"
#include "jred/error.hpp"
#include "jred/random.hpp"

namespace jred {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;

std::vector<int> canonical(const std::vector<int>& labels, int* count) {
  std::unordered_map<int, int> remap;
  std::vector<int> out(labels.size(), -1);
  for (size_t p = 0; p < labels.size(); ++p) {
    if (labels[p] < 0) continue;
    auto [it, fresh] = remap.try_emplace(labels[p], static_cast<int>(remap.size()));
    out[p] = it->second;
  }
  *count = static_cast<int>(remap.size());
  return out;
}

// Meet of two labelings; positions labeled -1 in `a` stay unlabeled.
std::vector<int> meet_labels(const std::vector<int>& a, const std::vector<int>& b, int* count) {
  std::unordered_map<std::uint64_t, int> ids;
  std::vector<int> out(a.size(), -1);
  for (size_t p = 0; p < a.size(); ++p) {
    if (a[p] < 0) continue;
    std::uint64_t key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a[p])) << 32) |
                        static_cast<std::uint32_t>(b[p]);
    auto [it, fresh] = ids.try_emplace(key, static_cast<int>(ids.size()));
    out[p] = it->second;
  }
  *count = static_cast<int>(ids.size());
  return out;
}

double entry_value(const SymBlockMatrix& t, const BlockStructure::Entry& e) { return t.get(e.block, e.i, e.j); }

std::vector<double> entries_of(const SymBlockMatrix& t) {
  const BlockStructure& s = t.structure();
  std::vector<double> v(static_cast<size_t>(s.dim()));
  Index p = 0;
  for (int k = 0; k < s.num_blocks(); ++k)
    for (int j = 0; j < s.order(k); ++j)
      for (int i = 0; i <= j; ++i) v[p++] = t.get(k, i, j);
  return v;
}

SymBlockMatrix normalized(SymBlockMatrix t) {
  double m = t.max_abs();
  if (m > 0) t *= 1.0 / m;
  return t;
}

std::vector<double> coefficients(Rng& rng, int n) {
  std::vector<double> t(n);
  for (auto& x : t) x = static_cast<double>(rng.sample_coefficient());
  return t;
}

SymBlockMatrix relation_combination(const SymRelation& r, Rng& rng) {
  const BlockStructure& s = r.structure();
  SymBlockMatrix x(s);
  for (Index p : r.members()) {
    auto e = s.entry(p);
    x.set(e.block, e.i, e.j, static_cast<double>(rng.sample_coefficient()));
  }
  return x;
}

SymBlockMatrix labeled_combination(const BlockStructure& s, const std::vector<int>& labels,
                                   const std::vector<double>& t) {
  SymBlockMatrix x(s);
  Index p = 0;
  for (int k = 0; k < s.num_blocks(); ++k)
    for (int j = 0; j < s.order(k); ++j)
      for (int i = 0; i <= j; ++i, ++p)
        if (labels[p] >= 0) x.set(k, i, j, t[labels[p]]);
  return x;
}

SubspaceBasis labeled_basis(const BlockStructure& s, const std::vector<int>& labels, int count) {
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(s.dim(), count);
  std::vector<double> weight(count, 0.0);
  for (Index p = 0; p < s.dim(); ++p) {
    if (labels[p] < 0) continue;
    auto e = s.entry(p);
    q(p, labels[p]) = e.i == e.j ? 1.0 : kSqrt2;
    weight[labels[p]] += e.i == e.j ? 1.0 : 2.0;
  }
  for (int c = 0; c < count; ++c) q.col(c) /= std::sqrt(weight[c]);
  return SubspaceBasis(s, std::move(q));
}

// Exact comparisons are safe for integer samples while every entry of the
// square stays below 2^53.
double square_tolerance(const BlockStructure& s) {
  int n = 0;
  for (int o : s.orders()) n = std::max(n, o);
  return n <= 8192 ? 0.0 : kDefaultTol;
}

PartitionNxN square_partition(const SymBlockMatrix& x, double sq_tol) {
  SymBlockMatrix t = square(x);
  return sq_tol == 0.0 ? entry_partition(t, 0.0) : entry_partition(normalized(t), sq_tol);
}

}  // namespace

PartitionNxN::PartitionNxN(BlockStructure s, std::vector<int> labels) : structure_(std::move(s)) {
  if (static_cast<Index>(labels.size()) != structure_.dim()) throw StructureError("partition label count mismatch");
  class_of_ = canonical(labels, &num_classes_);
  if (std::find(class_of_.begin(), class_of_.end(), -1) != class_of_.end())
    throw StructureError("partition must label every position");
}

PartitionNxN PartitionNxN::single_class(const BlockStructure& s) {
  return PartitionNxN(s, std::vector<int>(static_cast<size_t>(s.dim()), 0));
}

PartitionNxN PartitionNxN::discrete(const BlockStructure& s) {
  std::vector<int> l(static_cast<size_t>(s.dim()));
  for (size_t p = 0; p < l.size(); ++p) l[p] = static_cast<int>(p);
  return PartitionNxN(s, std::move(l));
}

std::vector<std::vector<Index>> PartitionNxN::classes() const {
  std::vector<std::vector<Index>> out(num_classes_);
  for (size_t p = 0; p < class_of_.size(); ++p) out[class_of_[p]].push_back(static_cast<Index>(p));
  return out;
}

SymBlockMatrix PartitionNxN::characteristic(int c) const {
  std::vector<double> t(num_classes_, 0.0);
  t[c] = 1.0;
  return combination(t);
}

SymBlockMatrix PartitionNxN::combination(const std::vector<double>& t) const {
  return labeled_combination(structure_, class_of_, t);
}

SubspaceBasis PartitionNxN::basis() const { return labeled_basis(structure_, class_of_, num_classes_); }

PartitionNxN meet(const PartitionNxN& a, const PartitionNxN& b) {
  require_same(a.structure(), b.structure());
  int n = 0;
  return PartitionNxN(a.structure(), meet_labels(a.labels(), b.labels(), &n));
}

long SymRelation::size() const { return static_cast<long>(std::count(member_.begin(), member_.end(), 1)); }

std::vector<Index> SymRelation::members() const {
  std::vector<Index> out;
  for (size_t p = 0; p < member_.size(); ++p)
    if (member_[p]) out.push_back(static_cast<Index>(p));
  return out;
}

SymRelation& SymRelation::operator|=(const SymRelation& o) {
  require_same(structure_, o.structure_);
  for (size_t p = 0; p < member_.size(); ++p) member_[p] |= o.member_[p];
  return *this;
}

SubspaceBasis SymRelation::basis() const {
  auto m = members();
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(structure_.dim(), static_cast<Index>(m.size()));
  for (size_t c = 0; c < m.size(); ++c) q(m[c], static_cast<Index>(c)) = 1.0;
  return SubspaceBasis(structure_, std::move(q));
}

bool SymRelation::is_transitive() const {
  for (int k = 0; k < structure_.num_blocks(); ++k) {
    const int n = structure_.order(k);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (!contains({k, i, j})) continue;
        for (int l = 0; l < n; ++l)
          if (contains({k, j, l}) && !contains({k, i, l})) return false;
      }
  }
  return true;
}

std::vector<std::vector<EntryIndex>> SymRelation::diagonal_classes() const {
  std::vector<std::vector<EntryIndex>> out;
  for (int k = 0; k < structure_.num_blocks(); ++k) {
    const int n = structure_.order(k);
    detail::DisjointSets dsu(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (contains({k, i, j})) dsu.unite(i, j);
    std::vector<int> group(n, -1);
    for (int i = 0; i < n; ++i) {
      if (!contains({k, i, i})) continue;
      auto r = dsu.find(i);
      if (group[r] < 0) {
        group[r] = static_cast<int>(out.size());
        out.emplace_back();
      }
      out[group[r]].push_back({k, i, i});
    }
  }
  return out;
}

SubspaceBasis PartitionOfRelation::basis() const {
  return labeled_basis(relation.structure(), class_of, num_classes);
}

SymBlockMatrix sample_f_square(const std::vector<SymBlockMatrix>& basis, std::uint64_t seed) {
  if (basis.empty()) return SymBlockMatrix();
  Rng rng(seed, 0xf5);
  SymBlockMatrix x(basis.front().structure());
  for (const auto& b : basis) x += static_cast<double>(rng.sample_coefficient()) * b;
  return square(x);
}

SymBlockMatrix sample_f_L(const std::vector<SymBlockMatrix>& basis, const AffineData& aff, std::uint64_t seed) {
  Rng rng(seed, 0xf1);
  SymBlockMatrix x(aff.structure);
  for (const auto& b : basis) x += static_cast<double>(rng.sample_coefficient()) * b;
  return aff.project_L(x);
}

PartitionNxN entry_partition(const SymBlockMatrix& t, double tol) {
  const BlockStructure& s = t.structure();
  std::vector<double> v = entries_of(t);
  std::vector<Index> order(v.size());
  for (size_t p = 0; p < order.size(); ++p) order[p] = static_cast<Index>(p);
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return v[a] < v[b]; });
  std::vector<int> labels(v.size(), 0);
  int cls = 0;
  for (size_t r = 1; r < order.size(); ++r) {
    double cur = v[order[r]], prev = v[order[r - 1]];
    if (cur - prev > tol * std::max(1.0, std::abs(cur))) ++cls;
    labels[order[r]] = cls;
  }
  return PartitionNxN(s, std::move(labels));
}

SymRelation entry_support(const SymBlockMatrix& t, double tol) {
  const BlockStructure& s = t.structure();
  SymRelation r(s);
  const double cut = tol * t.max_abs();
  std::vector<double> v = entries_of(t);
  for (size_t p = 0; p < v.size(); ++p)
    if (v[p] != 0.0 && std::abs(v[p]) > cut) r.insert(static_cast<Index>(p));
  return r;
}

PartitionResult optimal_partition_subspace(const AffineData& aff, std::uint64_t seed, double tol) {
  Rng rng(seed, 0xa1);
  const double sq_tol = square_tolerance(aff.structure);
  PartitionNxN p = meet(entry_partition(normalized(aff.Y_Lperp), tol), entry_partition(normalized(aff.C_L), tol));
  while (true) {
    const int before = p.num_classes();
    for (int rep = 0; rep < 2; ++rep) {
      SymBlockMatrix x = p.combination(coefficients(rng, p.num_classes()));
      p = meet(p, entry_partition(normalized(aff.project_L(x)), tol));
    }
    for (int rep = 0; rep < 2; ++rep)
      p = meet(p, square_partition(p.combination(coefficients(rng, p.num_classes())), sq_tol));
    if (p.num_classes() == before) break;
  }
  SubspaceBasis b = p.basis();
  return {std::move(p), std::move(b)};
}

RelationResult optimal_coordinate_subspace(const AffineData& aff, std::uint64_t seed, double tol, bool with_basis) {
  Rng rng(seed, 0xb2);
  SymRelation r = entry_support(aff.Y_Lperp, tol);
  r |= entry_support(aff.C_L, tol);
  while (true) {
    const long before = r.size();
    for (int rep = 0; rep < 2; ++rep) r |= entry_support(aff.project_L(relation_combination(r, rng)), tol);
    for (int rep = 0; rep < 2; ++rep) r |= entry_support(square(relation_combination(r, rng)), tol);
    if (r.size() == before) break;
  }
  SubspaceBasis b = with_basis ? r.basis() : SubspaceBasis();
  return {std::move(r), std::move(b)};
}

ZeroOneResult optimal_zeroone_subspace(const AffineData& aff, std::uint64_t seed, double tol) {
  Rng rng(seed, 0xc3);
  const BlockStructure& s = aff.structure;
  const double sq_tol = square_tolerance(s);
  PartitionOfRelation p;
  p.relation = entry_support(aff.Y_Lperp, tol);
  p.relation |= entry_support(aff.C_L, tol);
  {
    PartitionNxN init =
        meet(entry_partition(normalized(aff.Y_Lperp), tol), entry_partition(normalized(aff.C_L), tol));
    std::vector<int> l = init.labels();
    for (size_t q = 0; q < l.size(); ++q)
      if (!p.relation.contains(static_cast<Index>(q))) l[q] = -1;
    p.class_of = canonical(l, &p.num_classes);
  }

  auto step = [&](bool use_l) {
    std::vector<SymBlockMatrix> samples;
    for (int rep = 0; rep < 2; ++rep) {
      SymBlockMatrix x = labeled_combination(s, p.class_of, coefficients(rng, p.num_classes));
      samples.push_back(use_l ? normalized(aff.project_L(x)) : square(x));
    }
    for (const auto& t : samples) p.relation |= entry_support(t, tol);
    // Positions that joined R form one new class.
    bool added = false;
    for (size_t q = 0; q < p.class_of.size(); ++q)
      if (p.class_of[q] < 0 && p.relation.contains(static_cast<Index>(q))) {
        p.class_of[q] = p.num_classes;
        added = true;
      }
    if (added) ++p.num_classes;
    for (const auto& t : samples) {
      PartitionNxN ep = use_l ? entry_partition(t, tol)
                              : (sq_tol == 0.0 ? entry_partition(t, 0.0) : entry_partition(normalized(t), sq_tol));
      p.class_of = meet_labels(p.class_of, ep.labels(), &p.num_classes);
    }
  };

  while (true) {
    const long rel_before = p.relation.size();
    const int cls_before = p.num_classes;
    step(true);
    step(false);
    if (p.relation.size() == rel_before && p.num_classes == cls_before) break;
  }
  SubspaceBasis b = p.basis();
  return {std::move(p), std::move(b)};
}

bool is_matrix_equitable(const PartitionNxN& p, const SelfAdjointMap& map, double tol) {
  auto classes = p.classes();
  for (int c = 0; c < p.num_classes(); ++c) {
    SymBlockMatrix t = map(p.characteristic(c));
    const double scale = std::max(1.0, t.max_abs());
    for (const auto& cls : classes) {
      const double first = entry_value(t, p.structure().entry(cls.front()));
      for (Index q : cls)
        if (std::abs(entry_value(t, p.structure().entry(q)) - first) > tol * scale) return false;
    }
  }
  return true;
}

bool is_matrix_equitable(const PartitionNxN& p, const AffineData& aff, double tol) {
  return is_matrix_equitable(p, [&aff](const SymBlockMatrix& x) { return aff.project_L(x); }, tol);
}

PartitionNxN coarsest_jordan_configuration(const PartitionNxN& p0, std::uint64_t seed, double tol) {
  Rng rng(seed, 0xd4);
  const BlockStructure& s = p0.structure();
  const double sq_tol = square_tolerance(s) == 0.0 ? 0.0 : tol;
  PartitionNxN p = meet(p0, entry_partition(SymBlockMatrix::identity(s), 0.0));
  while (true) {
    const int before = p.num_classes();
    for (int rep = 0; rep < 2; ++rep)
      p = meet(p, square_partition(p.combination(coefficients(rng, p.num_classes())), sq_tol));
    if (p.num_classes() == before) break;
  }
  return p;
}

std::vector<SymRelation> invariant_coordinate_components(const AffineData& aff, double tol) {
  const BlockStructure& s = aff.structure;
  detail::DisjointSets dsu(static_cast<size_t>(s.dim()));
  for (const auto& c : aff.lperp.components()) {
    Eigen::MatrixXd m = c.q * c.q.transpose();
    const auto n = static_cast<Index>(c.positions.size());
    for (Index b = 0; b < n; ++b)
      for (Index a = 0; a < b; ++a)
        if (std::abs(m(a, b)) > tol) dsu.unite(static_cast<size_t>(c.positions[a]), static_cast<size_t>(c.positions[b]));
  }
  std::vector<int> group(static_cast<size_t>(s.dim()), -1);
  std::vector<SymRelation> out;
  for (Index p = 0; p < s.dim(); ++p) {
    auto r = dsu.find(static_cast<size_t>(p));
    if (group[r] < 0) {
      group[r] = static_cast<int>(out.size());
      out.emplace_back(s);
    }
    out[group[r]].insert(p);
  }
  return out;
}

}  // namespace jred
