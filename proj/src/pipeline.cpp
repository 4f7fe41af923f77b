#include "jred/pipeline.hpp"

#include <algorithm>
#include <chrono>

#include "jred/combinat.hpp"
#include "jred/error.hpp"
#include "jred/subspace.hpp"

namespace jred {

namespace {

constexpr Method kAllMethods[] = {Method::kOptimal, Method::kPartition, Method::kCoordinate, Method::kZeroOne,
                                  Method::kData};

// A method's subspace, held as a basis or, for coordinate subspaces that may
// be large, as a relation.
struct Computed {
  long dim = 0;
  std::vector<int> ranks;
  std::optional<SubspaceBasis> basis;
  std::optional<SymRelation> relation;
  std::optional<IdealDecomposition> decomp;
};

SymRelation full_relation(const BlockStructure& s) {
  SymRelation r(s);
  for (Index q = 0; q < s.dim(); ++q) r.insert(q);
  return r;
}

// Ideals of a transitive coordinate subspace are the full matrix algebras on
// its diagonal classes.
std::vector<int> relation_ranks(const SymRelation& r) {
  std::vector<int> ranks;
  for (const auto& c : r.diagonal_classes()) ranks.push_back(static_cast<int>(c.size()));
  return RankTuple(ranks).ranks;
}

void decompose_into(Computed& c, const PipelineOptions& o) {
  c.decomp = decompose_ideals(*c.basis, o.seed, o.tol);
  c.ranks = c.decomp->ranks().ranks;
}

Computed compute(Method m, const ConicProgram& p, const AffineData& aff, const PipelineOptions& o, bool need_basis) {
  Computed c;
  switch (m) {
    case Method::kOptimal:
      c.basis = optimal_admissible_subspace(aff, o.tol);
      break;
    case Method::kPartition:
      c.basis = optimal_partition_subspace(aff, o.seed, o.tol).basis;
      break;
    case Method::kZeroOne:
      c.basis = optimal_zeroone_subspace(aff, o.seed, o.tol).basis;
      break;
    case Method::kCoordinate: {
      RelationResult r = optimal_coordinate_subspace(aff, o.seed, o.tol, need_basis);
      c.dim = r.relation.size();
      c.ranks = relation_ranks(r.relation);
      c.relation = std::move(r.relation);
      if (need_basis) {
        c.basis = std::move(r.basis);
        decompose_into(c, o);
      }
      return c;
    }
    case Method::kData: {
      const long d = star_algebra_dimension(p, o.tol);
      if (d == p.structure.dim() && !need_basis) {
        c.dim = d;
        c.relation = full_relation(p.structure);
        c.ranks = relation_ranks(*c.relation);
        return c;
      }
      c.basis = star_algebra_subspace(p, o.tol);
      break;
    }
  }
  c.dim = c.basis->dim();
  decompose_into(c, o);
  return c;
}

ProgramSummary summarize(const ConicProgram& p) {
  return {p.structure.orders(), p.num_constraints(), p.nnz(), p.cost_nnz()};
}

class Stopwatch {
 public:
  double lap() {
    auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kOptimal: return "optimal";
    case Method::kPartition: return "partition";
    case Method::kCoordinate: return "coordinate";
    case Method::kZeroOne: return "zeroone";
    case Method::kData: return "data";
  }
  return "";
}

std::string_view subspace_key(Method m) {
  switch (m) {
    case Method::kOptimal: return "S_opt";
    case Method::kPartition: return "S_part";
    case Method::kCoordinate: return "S_coord";
    case Method::kZeroOne: return "S_01";
    case Method::kData: return "S_data";
  }
  return "";
}

Method parse_method(const std::string& s) {
  for (Method m : kAllMethods)
    if (s == to_string(m)) return m;
  throw DomainError("unknown method '" + s + "'");
}

FormChoice parse_form(const std::string& s) {
  if (s == "auto") return FormChoice::kAuto;
  if (s == "isomorphic") return FormChoice::kIsomorphic;
  if (s == "restriction") return FormChoice::kRestriction;
  throw DomainError("unknown form '" + s + "'");
}

PipelineResult run_pipeline(const ConicProgram& program, const PipelineOptions& o) {
  program.validate();
  Stopwatch clock;
  PipelineResult res;
  ReductionReport& rep = res.report;
  rep.instance = program.name;
  rep.method = std::string(to_string(o.method));
  rep.seed = o.seed;
  rep.tol = o.tol;
  rep.original = summarize(program);

  AffineData aff = build_affine_data(program, o.tol);
  rep.timings["affine"] = clock.lap();

  const bool mask_form = o.method == Method::kCoordinate || o.method == Method::kData;
  Computed c = compute(o.method, program, aff, o, o.form == FormChoice::kIsomorphic);
  rep.timings["subspace"] = clock.lap();
  const std::string key(subspace_key(o.method));
  rep.dims[key] = c.dim;
  rep.rank_tuples[key] = c.ranks;
  if (c.decomp) {
    for (const auto& id : c.decomp->ideals) rep.iso_classes.emplace_back(to_string(id.iso_class));
  } else {
    rep.iso_classes.assign(c.ranks.size(), std::string(to_string(IsoClass::kRealSym)));
  }

  const bool want_iso =
      o.form == FormChoice::kIsomorphic || (o.form == FormChoice::kAuto && !mask_form && c.decomp && c.decomp->all_real());
  std::optional<ReducedProgram> red;
  if (want_iso) {
    red = reformulate_isomorphic(program, *c.decomp, o.seed, o.tol);
    if (!red && o.form == FormChoice::kIsomorphic)
      throw DomainError("the subspace has an ideal without an explicit isomorphism");
    if (red) rep.multiplicities = c.decomp->phi->multiplicity;
  }
  if (!red) {
    if (c.basis)
      red = reformulate_restriction(program, *c.basis, o.tol);
    else
      red = reformulate_coordinate(program, *c.relation, o.tol);
  }
  rep.timings["reformulate"] = clock.lap();
  rep.form = std::string(to_string(red->form));
  rep.reduced = summarize(red->program);
  rep.kept_constraints = static_cast<int>(red->kept_constraints.size());

  if (o.compare) {
    for (Method m : kAllMethods) {
      if (m == o.method) continue;
      Computed other = compute(m, program, aff, o, false);
      rep.dims[std::string(subspace_key(m))] = other.dim;
      rep.rank_tuples[std::string(subspace_key(m))] = other.ranks;
    }
    rep.timings["compare"] = clock.lap();
  }
  if (o.verify_samples > 0) {
    rep.verification = verify_reduction(program, *red, o.verify_samples, o.seed);
    rep.timings["verify"] = clock.lap();
  }
  if (!o.timings) rep.timings.clear();
  res.reduced = std::move(*red);
  return res;
}

}  // namespace jred
