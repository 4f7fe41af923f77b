#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jred/program.hpp"

namespace jred {

struct HammingGraphSpec {
  int q = 1;                   // vertices are q-bit labels
  std::vector<int> distances;  // adjacency iff the Hamming distance is listed
};

// Lovasz theta SDP: minimize <-J, X> s.t. trace X = 1, X_uv = 0 on edges.
ConicProgram theta_sdp(const HammingGraphSpec& spec);

// The 3x3 nonnegative matrix used for the cp-rank tables.
Eigen::MatrixXd cprank_z();

// cp-rank lower bound: minimize t s.t. [[t, vec W^T], [vec W, X]] psd,
// W (x) W - X psd, X_{ij,ij} <= W_ij^2 and X_{ij,kl} = X_{il,kj}. The free
// parameters (t and the X orbits) are the equations of the program.
ConicProgram cprank_sdp(const Eigen::MatrixXd& w);

enum class SymmetryGroup { kTrivial, kCyclic, kDihedral, kBlockCopy };

// A program with a known strictly feasible primal point x0 and dual point
// (y0, s0 = C - sum y0_i A_i).
struct PlantedInstance {
  ConicProgram program;
  SymBlockMatrix x0;
  SymBlockMatrix s0;
  Eigen::VectorXd y0;
};

// Data are random matrices invariant under the group acting on [n] by
// simultaneous row and column permutation. kBlockCopy ties two copies of a
// random floor(n/2) block, plus a free scalar when n is odd.
PlantedInstance planted_symmetry_sdp(int n, SymmetryGroup group, std::uint64_t seed, int m = 3);

// Generators of the permutation action of a group on [n].
std::vector<std::vector<int>> group_generators(SymmetryGroup group, int n);

// Small random instance with a hidden permutation symmetry and sparse data.
PlantedInstance random_sdp(std::uint64_t seed, int max_order = 6, int max_constraints = 8);

// LP over 12 order-1 blocks indexed by Z4 x {0,1,2}; C4 rotates the first
// index of both variables and constraints, giving 3 orbits of each.
PlantedInstance c4_lp(std::uint64_t seed);

// Builds a named instance: hamming:q:d1[,d2...], cprank:{Z|ZxZ|ZxZxZ},
// planted:{trivial|cyclic|dihedral|blockcopy}:n, random:k, lp:c4.
ConicProgram generate_instance(const std::string& spec, std::uint64_t seed = 0);

// Names accepted by generate_instance that are small enough for the test suites.
std::vector<std::string> bundled_instances();

}  // namespace jred
