#include <json.hpp>

#include "jred/pipeline.hpp"

namespace jred {

namespace {

using nlohmann::json;

json summary_json(const ProgramSummary& s) {
  return {{"orders", s.orders}, {"num_constraints", s.num_constraints}, {"nnz", s.nnz}, {"cost_nnz", s.cost_nnz}};
}

json verification_json(const VerificationReport& v) {
  return {{"passed", v.passed()},
          {"admissible", v.admissible},
          {"failures", v.failures},
          {"primal_samples", v.primal_samples},
          {"dual_samples", v.dual_samples},
          {"map_gram_residual", v.map_gram_residual},
          {"map_range_residual", v.map_range_residual},
          {"homomorphism_residual", v.homomorphism_residual},
          {"primal_affine_residual", v.primal_affine_residual},
          {"primal_objective_gap", v.primal_objective_gap},
          {"primal_cone_violation", v.primal_cone_violation},
          {"dual_affine_residual", v.dual_affine_residual},
          {"dual_objective_gap", v.dual_objective_gap},
          {"dual_cone_violation", v.dual_cone_violation}};
}

}  // namespace

std::string report_to_json(const ReductionReport& r) {
  // nlohmann::json objects are std::map backed, so keys come out sorted.
  json j;
  j["schema"] = 1;
  j["instance"] = r.instance;
  j["method"] = r.method;
  j["form"] = r.form;
  j["seed"] = r.seed;
  j["tol"] = r.tol;
  j["dims"] = r.dims;
  j["rank_tuples"] = r.rank_tuples;
  j["iso_classes"] = r.iso_classes;
  j["multiplicities"] = r.multiplicities;
  j["original"] = summary_json(r.original);
  j["reduced"] = summary_json(r.reduced);
  j["nnz_before"] = r.original.nnz;
  j["nnz_after"] = r.reduced.nnz;
  j["kept_constraints"] = r.kept_constraints;
  if (r.verification) j["verification"] = verification_json(*r.verification);
  if (!r.timings.empty()) j["timings"] = r.timings;
  return j.dump(2) + "\n";
}

}  // namespace jred
