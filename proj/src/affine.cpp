#include <algorithm>
#include <cmath>
#include <string>

#include "dsu.hpp"
#include "jred/error.hpp"
#include "jred/kernels.hpp"
#include "jred/subspace.hpp"

namespace jred {

LperpProjector::LperpProjector(const ConicProgram& program, double tol) : structure_(program.structure) {
  const Index n = structure_.dim();
  const int m = program.num_constraints();
  y_ = Eigen::VectorXd::Zero(n);

  std::vector<std::vector<std::pair<Index, double>>> rows(m);
  detail::DisjointSets dsu(static_cast<std::size_t>(n));
  for (int i = 0; i < m; ++i) {
    rows[i] = program.a[i].svec_sparse(structure_);
    std::erase_if(rows[i], [](const auto& pv) { return pv.second == 0.0; });
    for (size_t t = 1; t < rows[i].size(); ++t) dsu.unite(rows[i][0].first, rows[i][t].first);
  }

  std::vector<int> comp_of_root(n, -1);
  std::vector<Index> comp_root;
  std::vector<std::vector<int>> comp_rows;
  for (int i = 0; i < m; ++i) {
    if (rows[i].empty()) {
      if (program.b[i] != 0.0)
        throw InfeasibleAffineError("constraint " + std::to_string(i + 1) + " has zero matrix and nonzero rhs");
      continue;
    }
    auto r = static_cast<Index>(dsu.find(rows[i][0].first));
    if (comp_of_root[r] < 0) {
      comp_of_root[r] = static_cast<int>(comp_rows.size());
      comp_rows.emplace_back();
      comp_root.push_back(r);
    }
    comp_rows[comp_of_root[r]].push_back(i);
  }

  // Components ordered by their smallest svec position.
  std::vector<int> order(comp_rows.size());
  for (size_t c = 0; c < order.size(); ++c) order[c] = static_cast<int>(c);
  std::sort(order.begin(), order.end(), [&](int x, int y) { return comp_root[x] < comp_root[y]; });

  std::vector<int> local(n, -1);
  for (int c : order) {
    Component comp;
    comp.rows = comp_rows[c];
    for (int i : comp.rows)
      for (const auto& pv : rows[i]) comp.positions.push_back(pv.first);
    std::sort(comp.positions.begin(), comp.positions.end());
    comp.positions.erase(std::unique(comp.positions.begin(), comp.positions.end()), comp.positions.end());
    const auto p = static_cast<Index>(comp.positions.size());
    for (Index t = 0; t < p; ++t) local[comp.positions[t]] = static_cast<int>(t);

    std::vector<Eigen::VectorXd> qs;
    std::vector<double> z;
    for (int i : comp.rows) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(p);
      for (const auto& pv : rows[i]) v[local[pv.first]] += pv.second;
      const double row_norm = v.norm();
      Eigen::VectorXd coef = Eigen::VectorXd::Zero(static_cast<Index>(qs.size()));
      for (int pass = 0; pass < 2; ++pass) {
        for (size_t k = 0; k < qs.size(); ++k) {
          double d = kernels::dot(qs[k].data(), v.data(), static_cast<std::size_t>(p));
          coef[static_cast<Index>(k)] += d;
          kernels::axpy(-d, qs[k].data(), v.data(), static_cast<std::size_t>(p));
        }
      }
      double partial = 0;
      for (size_t k = 0; k < qs.size(); ++k) partial += coef[static_cast<Index>(k)] * z[k];
      const double r = v.norm();
      if (r > tol * row_norm) {
        v /= r;
        qs.push_back(std::move(v));
        z.push_back((program.b[i] - partial) / r);
        comp.kept.push_back(i);
      } else {
        double scale = std::max({std::abs(program.b[i]), std::abs(partial), 1e-300});
        if (std::abs(partial - program.b[i]) > 1e-6 * scale)
          throw InfeasibleAffineError("constraint " + std::to_string(i + 1) +
                                      " is inconsistent with earlier constraints");
      }
    }
    comp.q.resize(p, static_cast<Index>(qs.size()));
    for (size_t k = 0; k < qs.size(); ++k) comp.q.col(static_cast<Index>(k)) = qs[k];
    Eigen::VectorXd yl = comp.q * Eigen::Map<Eigen::VectorXd>(z.data(), static_cast<Index>(z.size()));
    for (Index t = 0; t < p; ++t) {
      y_[comp.positions[t]] = yl[t];
      local[comp.positions[t]] = -1;
    }
    comps_.push_back(std::move(comp));
  }
}

int LperpProjector::rank() const {
  int r = 0;
  for (const auto& c : comps_) r += static_cast<int>(c.q.cols());
  return r;
}

Eigen::VectorXd LperpProjector::apply(const Eigen::VectorXd& x) const {
  if (x.size() != structure_.dim()) throw StructureError("vector length does not match structure");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size());
  for (const auto& c : comps_) {
    const auto p = static_cast<Index>(c.positions.size());
    if (p == 1) {
      out[c.positions[0]] = x[c.positions[0]];
      continue;
    }
    Eigen::VectorXd xl(p);
    for (Index t = 0; t < p; ++t) xl[t] = x[c.positions[t]];
    Eigen::VectorXd yl = c.q * (c.q.transpose() * xl);
    for (Index t = 0; t < p; ++t) out[c.positions[t]] = yl[t];
  }
  return out;
}

SymBlockMatrix LperpProjector::apply(const SymBlockMatrix& x) const {
  require_same(structure_, x.structure());
  return smat(structure_, apply(svec(x)));
}

std::vector<int> LperpProjector::kept_rows() const {
  std::vector<int> out;
  for (const auto& c : comps_) out.insert(out.end(), c.kept.begin(), c.kept.end());
  std::sort(out.begin(), out.end());
  return out;
}

SubspaceBasis LperpProjector::basis() const {
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(structure_.dim(), rank());
  Index col = 0;
  for (const auto& c : comps_)
    for (Index k = 0; k < c.q.cols(); ++k, ++col)
      for (size_t t = 0; t < c.positions.size(); ++t) q(c.positions[t], col) = c.q(static_cast<Index>(t), k);
  return SubspaceBasis(structure_, std::move(q));
}

AffineData build_affine_data(const ConicProgram& program, double tol) {
  program.validate();
  AffineData aff;
  aff.structure = program.structure;
  aff.lperp = LperpProjector(program, tol);
  aff.b = Eigen::Map<const Eigen::VectorXd>(program.b.data(), static_cast<Index>(program.b.size()));
  aff.C = program.c.dense(program.structure);
  aff.C_L = aff.C - aff.lperp.apply(aff.C);
  aff.Y_Lperp = smat(program.structure, aff.lperp.min_norm_point());
  return aff;
}

}  // namespace jred
