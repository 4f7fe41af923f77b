#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "jred/error.hpp"
#include "jred/instances.hpp"
#include "jred/io.hpp"
#include "jred/pipeline.hpp"

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw jred::Error("cannot write " + path);
  out << text;
  if (!out) throw jred::Error("write failed for " + path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symmetry reduction of semidefinite programs via Jordan algebras"};
  std::string method = "optimal", form = "auto", input, output, report, generate;
  std::uint64_t seed = 0;
  double tol = jred::kDefaultTol;
  int verify = 0;
  bool timings = false, compare = false;
  app.add_option("--method", method, "optimal, partition, coordinate, zeroone or data")
      ->check(CLI::IsMember({"optimal", "partition", "coordinate", "zeroone", "data"}));
  app.add_option("--form", form, "isomorphic, restriction or auto")
      ->check(CLI::IsMember({"auto", "isomorphic", "restriction"}));
  auto* in_opt = app.add_option("--input", input, "SDPA sparse input file");
  auto* gen_opt = app.add_option("--generate", generate,
                                 "hamming:q:d1[,d2], cprank:{Z|ZxZ|ZxZxZ}, planted:group:n, random:k or lp:c4");
  in_opt->excludes(gen_opt);
  app.add_option("--output", output, "reduced program in SDPA sparse format");
  app.add_option("--report", report, "JSON report path (default: standard output)");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--tol", tol, "numerical tolerance")->check(CLI::PositiveNumber);
  app.add_option("--verify", verify, "number of sampled points for verification")->check(CLI::NonNegativeNumber);
  app.add_flag("--timings", timings, "include per-phase timings in the report");
  app.add_flag("--compare", compare, "also report the subspaces of the other methods");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  if (input.empty() == generate.empty()) {
    std::cerr << "error: exactly one of --input and --generate is required\n";
    return 1;
  }

  try {
    jred::ConicProgram program;
    if (!input.empty()) {
      program = jred::read_program(input);
      if (program.name.empty()) program.name = std::filesystem::path(input).stem().string();
    } else {
      program = jred::generate_instance(generate, seed);
    }
    jred::PipelineOptions opts;
    opts.method = jred::parse_method(method);
    opts.form = jred::parse_form(form);
    opts.seed = seed;
    opts.tol = tol;
    opts.verify_samples = verify;
    opts.timings = timings;
    opts.compare = compare;
    jred::PipelineResult res = jred::run_pipeline(program, opts);
    if (!output.empty()) jred::write_program(output, res.reduced.program);
    const std::string json = jred::report_to_json(res.report);
    if (report.empty())
      std::cout << json;
    else
      write_text(report, json);
    if (res.report.verification && !res.report.verification->passed()) {
      for (const auto& f : res.report.verification->failures) std::cerr << "verification: " << f << "\n";
      return 2;
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
