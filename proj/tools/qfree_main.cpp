// Command-line front end: minimize a Hamiltonian over pure Gaussian states,
// verify a report against the Fock oracle, or re-run the certification.

#include <chrono>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "qfree/hamiltonian_io.h"
#include "qfree/report.h"

namespace {

using nlohmann::json;

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw qfree::Error(path + ": cannot open file");
  return json::parse(in);
}

void write_json(const json& doc, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << doc.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw qfree::Error(path + ": cannot write file");
  out << doc.dump(2) << '\n';
}

std::string now_iso8601() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimize polynomial Hamiltonians over pure Gaussian states"};
  app.require_subcommand(1);

  std::string spec_path;
  std::string mode_name = "bose-even";
  std::string report_path = "-";
  bool hermitian_complete = false;
  qfree::RunOptions run;
  std::optional<double> tol;
  std::optional<int> cutoff;
  auto* minimize = app.add_subcommand("minimize", "minimize a Hamiltonian and write a JSON report");
  minimize->add_option("spec", spec_path, "Hamiltonian JSON file")->required()->check(CLI::ExistingFile);
  minimize->add_option("--mode", mode_name, "bose-even | bose-full | fermi-even | fermi-odd")
      ->check(CLI::IsMember({"bose-even", "bose-full", "fermi-even", "fermi-odd"}));
  minimize->add_option("--tol", tol, "gradient tolerance (default 1e-8)");
  minimize->add_option("--cutoff", cutoff, "Bose occupation cutoff for the oracle (default 10)");
  minimize->add_option("--seed", run.seed, "multistart seed");
  minimize->add_option("--max-iter", run.max_iterations, "iteration cap per start");
  minimize->add_option("--starts", run.random_starts, "random starts in addition to the base start");
  minimize->add_option("--fd-step", run.fd_step, "finite-difference step for certification");
  minimize->add_option("--report", report_path, "output report (default stdout)");
  minimize->add_flag("--hermitian-complete", hermitian_complete, "add missing conjugate terms");

  std::string verify_path;
  auto* verify = app.add_subcommand("verify", "re-run the oracle checks recorded in a report");
  verify->add_option("report", verify_path, "report JSON")->required()->check(CLI::ExistingFile);

  std::string certify_path;
  std::string certify_out;
  double fd_step = 1e-3;
  auto* certify = app.add_subcommand("certify", "re-run the certification battery on a report");
  certify->add_option("report", certify_path, "report JSON")->required()->check(CLI::ExistingFile);
  certify->add_option("--fd-step", fd_step, "finite-difference step");
  certify->add_option("--out", certify_out, "output path (default: update the report in place)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*minimize) {
      auto parsed = qfree::parse_hamiltonian_file(spec_path, hermitian_complete);
      run.mode = qfree::parse_mode(mode_name);
      run.tol = tol.value_or(parsed.options.tol.value_or(run.tol));
      run.cutoff = cutoff.value_or(parsed.options.cutoff.value_or(run.cutoff));
      run.timestamp = now_iso8601();
      const json report = qfree::run_report(parsed.poly, run);
      write_json(report, report_path);
      return report.at("status") == "converged" ? 0 : 2;
    }
    if (*verify) {
      const json result = qfree::verify_report(read_json(verify_path));
      std::cout << result.dump(2) << '\n';
      return result.at("passed").get<bool>() ? 0 : 1;
    }
    if (*certify) {
      const json report = qfree::certify_report(read_json(certify_path), fd_step);
      write_json(report, certify_out.empty() ? certify_path : certify_out);
      std::cout << report.at("certification").dump(2) << '\n';
      return report.at("certification").at("passed").get<bool>() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
