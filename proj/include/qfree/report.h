#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "qfree/variational.h"

namespace qfree {

struct RunOptions {
  Mode mode = Mode::BoseEven;
  double tol = 1e-8;
  int cutoff = kDefaultBoseCutoff;
  std::uint64_t seed = 42;
  int max_iterations = 5000;
  int random_starts = 4;
  double fd_step = 1e-3;
  long max_dimension = kDefaultDimensionCap;
  // Written into the report; empty keeps the report free of wall-clock data.
  std::string timestamp;
};

nlohmann::json complex_json(Complex c);
Complex complex_from_json(const nlohmann::json& j);
nlohmann::json matrix_json(const CMatrix& m);
CMatrix matrix_from_json(const nlohmann::json& j);
nlohmann::json vector_json(const CVector& v);
CVector vector_from_json(const nlohmann::json& j);

nlohmann::json map_json(const BogoliubovMap& m);
BogoliubovMap map_from_json(const nlohmann::json& j);

nlohmann::json certification_json(const Certification& cert, double fd_step);

// Minimizes, certifies and cross-checks against the Fock oracle.
nlohmann::json run_report(const WickPolynomial& H, const RunOptions& opts);

// Recomputes engine blocks and oracle numbers from the stored Hamiltonian and
// map. The returned object has a boolean "passed".
nlohmann::json verify_report(const nlohmann::json& report);

// Re-runs the certification battery and replaces the report's block.
nlohmann::json certify_report(nlohmann::json report, double fd_step);

}  // namespace qfree
