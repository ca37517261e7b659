#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ddw/ddw.hpp"

namespace {

enum Exit { Ok = 0, Usage = 1, Parse = 2, Pipeline = 3, Verification = 4 };

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Covariant Hamiltonian analysis of first-order field theories"};
  app.require_subcommand(1);

  std::string model_path;
  std::string emit = "text";
  std::string stage;
  std::string out_path;
  auto* analyze = app.add_subcommand("analyze", "Run the derivation and print its stages");
  analyze->add_option("file", model_path, "Model file")->required();
  analyze->add_option("--emit", emit, "Output format")->check(CLI::IsMember({"text", "latex", "json"}));
  analyze->add_option("--stage", stage, "Restrict output to one stage")->check(CLI::IsMember(ddw::stage_names()));
  analyze->add_option("--out", out_path, "Write to a file instead of stdout");

  std::string solution_path;
  ddw::VerifyOptions opts;
  auto* verify = app.add_subcommand("verify", "Check a candidate solution against the emitted equations");
  verify->add_option("file", model_path, "Model file")->required();
  verify->add_option("--solution", solution_path, "Solution file")->required();
  verify->add_option("--step", opts.step, "Finite-difference step")->check(CLI::PositiveNumber);
  verify->add_option("--tol", opts.tolerance, "Residual tolerance")->check(CLI::NonNegativeNumber);
  verify->add_option("--samples", opts.samples, "Number of random sample points")->check(CLI::PositiveNumber);
  verify->add_option("--seed", opts.seed, "Sampling seed");

  auto* stages = app.add_subcommand("stages", "List the pipeline stages");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? Ok : Usage;
  }

  if (stages->parsed()) {
    for (const auto& s : ddw::stage_names()) std::cout << s << "\n";
    return Ok;
  }

  ddw::FieldModel model;
  try {
    model = ddw::parse_model(read_file(model_path));
  } catch (const ddw::ParseError& e) {
    std::cerr << model_path << ":" << e.what() << "\n";
    return Parse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Usage;
  }

  ddw::DerivedSystem ds;
  try {
    ds = ddw::run_pipeline(model);
  } catch (const ddw::PipelineError& e) {
    std::cerr << "pipeline error in stage " << e.what() << "\n";
    return Pipeline;
  }

  if (analyze->parsed()) {
    ddw::Format f = emit == "json" ? ddw::Format::Json : emit == "latex" ? ddw::Format::Latex : ddw::Format::Text;
    try {
      write_output(ddw::render_system(ds, f, stage), out_path);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return Usage;
    }
    return Ok;
  }

  ddw::Solution sol;
  try {
    sol = ddw::parse_solution(read_file(solution_path), model);
  } catch (const ddw::ParseError& e) {
    std::cerr << solution_path << ":" << e.what() << "\n";
    return Parse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Usage;
  }
  try {
    auto rep = ddw::verify_numeric(ds, sol, opts);
    for (const auto& r : rep.entries)
      std::cout << (r.max_abs <= rep.tolerance ? "ok   " : "FAIL ") << r.group << " | " << r.label << " | max residual "
                << r.max_abs << "\n";
    std::cout << "max residual " << rep.max_residual() << " (tolerance " << rep.tolerance << ", step " << opts.step << ", "
              << opts.samples << " samples)\n";
    return rep.ok() ? Ok : Verification;
  } catch (const ddw::Error& e) {
    std::cerr << "verification error: " << e.what() << "\n";
    return Verification;
  }
}
