#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jred/reduce.hpp"

namespace jred {

enum class Method { kOptimal, kPartition, kCoordinate, kZeroOne, kData };
enum class FormChoice { kAuto, kIsomorphic, kRestriction };

std::string_view to_string(Method m);
// Report key of the subspace a method computes: S_opt, S_part, S_coord, S_01, S_data.
std::string_view subspace_key(Method m);
Method parse_method(const std::string& s);
FormChoice parse_form(const std::string& s);

struct PipelineOptions {
  Method method = Method::kOptimal;
  FormChoice form = FormChoice::kAuto;
  std::uint64_t seed = 0;
  double tol = kDefaultTol;
  int verify_samples = 0;
  // Also compute the subspaces of the other methods.
  bool compare = false;
  bool timings = false;
};

struct ProgramSummary {
  std::vector<int> orders;
  int num_constraints = 0;
  long nnz = 0;
  long cost_nnz = 0;
};

struct ReductionReport {
  std::string instance;
  std::string method;
  std::string form;
  std::uint64_t seed = 0;
  double tol = 0;
  std::map<std::string, long> dims;
  std::map<std::string, std::vector<int>> rank_tuples;
  std::vector<std::string> iso_classes;
  std::vector<int> multiplicities;
  ProgramSummary original;
  ProgramSummary reduced;
  int kept_constraints = 0;
  std::optional<VerificationReport> verification;
  std::map<std::string, double> timings;  // seconds; emitted only when requested
};

// Key-sorted JSON document, terminated by a newline.
std::string report_to_json(const ReductionReport& r);

struct PipelineResult {
  ReducedProgram reduced;
  ReductionReport report;
};

// Computes the method's subspace, decomposes it and writes the reduced program
// in the requested form. Automatic form picks the isomorphic reduction when
// every ideal is a real symmetric matrix algebra, except for the coordinate
// method, whose restriction is a plain entry mask.
PipelineResult run_pipeline(const ConicProgram& program, const PipelineOptions& opts);

}  // namespace jred
