#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "jred/subspace.hpp"
#include "jred/symspace.hpp"

namespace jred {

struct EntryIndex {
  int block;
  int i;
  int j;
};

// Partition of all within-block positions. Positions are svec indices, so
// (i,j) and (j,i) always share a class. Class ids are numbered by first
// appearance in svec order.
class PartitionNxN {
 public:
  PartitionNxN() = default;
  PartitionNxN(BlockStructure s, std::vector<int> labels);

  static PartitionNxN single_class(const BlockStructure& s);
  static PartitionNxN discrete(const BlockStructure& s);

  const BlockStructure& structure() const { return structure_; }
  int num_classes() const { return num_classes_; }
  int class_of(Index pos) const { return class_of_[pos]; }
  int class_of(const EntryIndex& e) const { return class_of_[structure_.svec_index(e.block, e.i, e.j)]; }
  const std::vector<int>& labels() const { return class_of_; }
  std::vector<std::vector<Index>> classes() const;

  // 0/1 characteristic matrix of class c.
  SymBlockMatrix characteristic(int c) const;
  SymBlockMatrix combination(const std::vector<double>& t) const;
  SubspaceBasis basis() const;

  bool operator==(const PartitionNxN& o) const { return structure_ == o.structure_ && class_of_ == o.class_of_; }

 private:
  BlockStructure structure_;
  std::vector<int> class_of_;
  int num_classes_ = 0;
};

PartitionNxN meet(const PartitionNxN& a, const PartitionNxN& b);

class SymRelation {
 public:
  SymRelation() = default;
  explicit SymRelation(const BlockStructure& s) : structure_(s), member_(static_cast<size_t>(s.dim()), 0) {}

  const BlockStructure& structure() const { return structure_; }
  bool contains(Index pos) const { return member_[pos] != 0; }
  bool contains(const EntryIndex& e) const { return contains(structure_.svec_index(e.block, e.i, e.j)); }
  void insert(Index pos) { member_[pos] = 1; }
  // Number of member positions (a symmetric pair counts once).
  long size() const;
  std::vector<Index> members() const;
  SymRelation& operator|=(const SymRelation& o);
  bool operator==(const SymRelation& o) const { return structure_ == o.structure_ && member_ == o.member_; }

  // Span of E_ij + E_ji over members.
  SubspaceBasis basis() const;
  // True when (i,j),(j,k) in R imply (i,k) in R.
  bool is_transitive() const;
  // Classes of {i : (i,i) in R} under the equivalence R, per block.
  std::vector<std::vector<EntryIndex>> diagonal_classes() const;

 private:
  BlockStructure structure_;
  std::vector<char> member_;
};

// Partition of the members of a relation; non-members carry label -1.
struct PartitionOfRelation {
  SymRelation relation;
  std::vector<int> class_of;
  int num_classes = 0;

  SubspaceBasis basis() const;
};

// Samples (sum t_B B)^2 with t_B uniform integers in [1, 2^20].
SymBlockMatrix sample_f_square(const std::vector<SymBlockMatrix>& basis, std::uint64_t seed);
// Samples P_L(sum t_B B).
SymBlockMatrix sample_f_L(const std::vector<SymBlockMatrix>& basis, const AffineData& aff, std::uint64_t seed);

PartitionNxN entry_partition(const SymBlockMatrix& t, double tol = kDefaultTol);
SymRelation entry_support(const SymBlockMatrix& t, double tol = kDefaultTol);

struct PartitionResult {
  PartitionNxN partition;
  SubspaceBasis basis;
};
struct RelationResult {
  SymRelation relation;
  SubspaceBasis basis;
};
struct ZeroOneResult {
  PartitionOfRelation partition;
  SubspaceBasis basis;
};

PartitionResult optimal_partition_subspace(const AffineData& aff, std::uint64_t seed = 0, double tol = kDefaultTol);
// Without `with_basis` only the relation is returned, which keeps large
// coordinate subspaces cheap.
RelationResult optimal_coordinate_subspace(const AffineData& aff, std::uint64_t seed = 0, double tol = kDefaultTol,
                                           bool with_basis = true);
ZeroOneResult optimal_zeroone_subspace(const AffineData& aff, std::uint64_t seed = 0, double tol = kDefaultTol);

using SelfAdjointMap = std::function<SymBlockMatrix(const SymBlockMatrix&)>;

bool is_matrix_equitable(const PartitionNxN& p, const SelfAdjointMap& map, double tol = 1e-8);
bool is_matrix_equitable(const PartitionNxN& p, const AffineData& aff, double tol = 1e-8);

PartitionNxN coarsest_jordan_configuration(const PartitionNxN& p, std::uint64_t seed = 0, double tol = kDefaultTol);

std::vector<SymRelation> invariant_coordinate_components(const AffineData& aff, double tol = kDefaultTol);

}  // namespace jred
