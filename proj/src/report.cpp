#include "qfree/report.h"

#include <cmath>

#include "qfree/hamiltonian_io.h"

namespace qfree {

using nlohmann::json;

namespace {

constexpr double kEngineOracleTol = 1e-6;
constexpr double kReproduceTol = 1e-8;

json trace_json(const std::vector<double>& trace) {
  bool monotone = true;
  for (std::size_t k = 1; k < trace.size(); ++k) {
    if (trace[k] > trace[k - 1] + 1e-12 * std::max(1.0, std::abs(trace[k - 1]))) monotone = false;
  }
  return {{"initial_energy", trace.empty() ? 0.0 : trace.front()},
          {"final_energy", trace.empty() ? 0.0 : trace.back()},
          {"accepted_steps", trace.empty() ? 0 : trace.size() - 1},
          {"monotone", monotone}};
}

json check_json(const CheckOutcome& c) {
  return {{"passed", c.passed}, {"skipped", c.skipped}, {"worst", c.worst}, {"detail", c.detail}};
}

json oracle_json(const WickPolynomial& H, const BogoliubovMap& U, double energy, int cutoff, long max_dimension) {
  try {
    int used = cutoff;
    const double expectation = oracle_energy(H, U, cutoff, max_dimension, kDefaultTailTolerance, &used);
    const FockBasis basis(H.stats(), H.n_modes(), used, max_dimension);
    const double ground = ground_energy(H, basis);
    return {{"expectation", expectation},
            {"ground_energy", ground},
            {"gap", energy - ground},
            {"engine_minus_oracle", energy - expectation},
            {"cutoff", H.stats() == Statistics::Fermi ? 1 : used}};
  } catch (const Error& e) {
    return {{"error", e.what()}};
  }
}

Mode report_mode(const json& report) { return parse_mode(report.at("mode").get<std::string>()); }

Status parse_status(const std::string& s) {
  for (Status st : {Status::Converged, Status::MaxIterations, Status::UnboundedBelow}) {
    if (s == to_string(st)) return st;
  }
  throw Error("unknown status '" + s + "'");
}

json spectrum_json(const RVector& s) { return std::vector<double>(s.data(), s.data() + s.size()); }

}  // namespace

json complex_json(Complex c) { return json::array({c.real(), c.imag()}); }

Complex complex_from_json(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

json matrix_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? 0 : static_cast<Eigen::Index>(j.at(0).size());
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = complex_from_json(j.at(i).at(k));
  }
  return m;
}

json vector_json(const CVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_json(v(i)));
  return out;
}

CVector vector_from_json(const json& j) {
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = complex_from_json(j.at(i));
  return v;
}

json map_json(const BogoliubovMap& m) {
  return {{"statistics", to_string(m.stats)},
          {"p", matrix_json(m.p)},
          {"q", matrix_json(m.q)},
          {"xi", vector_json(m.xi)},
          {"parity", to_string(m.parity)}};
}

BogoliubovMap map_from_json(const json& j) {
  BogoliubovMap m;
  m.stats = j.at("statistics").get<std::string>() == "fermi" ? Statistics::Fermi : Statistics::Bose;
  m.p = matrix_from_json(j.at("p"));
  m.q = matrix_from_json(j.at("q"));
  m.xi = vector_from_json(j.at("xi"));
  m.parity = j.at("parity").get<std::string>() == "odd" ? Parity::Odd : Parity::Even;
  return m;
}

json certification_json(const Certification& cert, double fd_step) {
  return {{"fd_step", fd_step},
          {"passed", cert.passed()},
          {"residual_K", cert.norm_K},
          {"residual_O", cert.norm_O},
          {"fd_check", check_json(cert.fd_check)},
          {"quadratic_check", check_json(cert.quadratic_check)},
          {"gauge_check", check_json(cert.gauge_check)}};
}

json run_report(const WickPolynomial& H, const RunOptions& opts) {
  MinimizeOptions mo;
  mo.tol_grad = opts.tol;
  mo.max_iterations = opts.max_iterations;
  mo.random_starts = opts.random_starts;
  mo.seed = opts.seed;
  const MinimizationResult res = minimize(H, opts.mode, mo);

  json report;
  report["status"] = to_string(res.status);
  report["mode"] = to_string(opts.mode);
  report["statistics"] = to_string(H.stats());
  report["modes"] = H.n_modes();
  report["seed"] = opts.seed;
  report["energy"] = res.energy;
  report["D"] = matrix_json(res.blocks.D);
  report["D_spectrum"] = spectrum_json(res.D_spectrum);
  report["residual"] = res.residual;
  report["residual_K"] = res.blocks.norm_K();
  report["residual_O"] = res.blocks.norm_O();
  report["iterations"] = res.iterations;
  report["starts"] = res.starts_tried;
  report["trace"] = trace_json(res.energy_trace);
  report["options"] = {{"tol", opts.tol},
                       {"cutoff", opts.cutoff},
                       {"max_iterations", opts.max_iterations},
                       {"random_starts", opts.random_starts},
                       {"max_dimension", opts.max_dimension}};
  report["map"] = map_json(res.U);
  report["hamiltonian"] = serialize_hamiltonian(H);

  if (res.status == Status::Converged) {
    CertifyOptions co;
    co.fd_step = opts.fd_step;
    co.cutoff = opts.cutoff;
    co.max_dimension = opts.max_dimension;
    report["certification"] = certification_json(certify(res, H, opts.mode, co), opts.fd_step);
  } else {
    report["certification"] = {{"skipped", true}, {"reason", "run did not converge"}};
  }
  if (res.status == Status::UnboundedBelow) {
    report["oracle"] = {{"error", "energy unbounded below on the Gaussian manifold"}};
  } else {
    report["oracle"] = oracle_json(H, res.U, res.energy, opts.cutoff, opts.max_dimension);
  }
  report["timestamp"] = opts.timestamp;
  return report;
}

json verify_report(const json& report) {
  const WickPolynomial H = parse_hamiltonian(report.at("hamiltonian")).poly;
  const BogoliubovMap U = map_from_json(report.at("map"));
  const Mode mode = report_mode(report);
  const Status status = parse_status(report.at("status").get<std::string>());
  check_admissible(H, mode);

  json checks = json::object();
  bool passed = true;
  auto record = [&](const std::string& name, bool ok, double value) {
    checks[name] = {{"passed", ok}, {"value", value}};
    passed = passed && ok;
  };

  record("map_group_residual", U.group_residual() < 1e-8, U.group_residual());
  if (status == Status::UnboundedBelow) {
    return {{"passed", passed}, {"status", to_string(status)}, {"checks", checks}};
  }

  const TransformedBlocks blocks = residuals(H, U);
  const double energy = report.at("energy").get<double>();
  const double scale = std::max(1.0, std::abs(energy));
  record("energy_reproduced", std::abs(blocks.B.real() - energy) <= kReproduceTol * scale,
         std::abs(blocks.B.real() - energy));
  record("energy_real", std::abs(blocks.B.imag()) <= 1e-10, std::abs(blocks.B.imag()));

  const auto stored = report.at("D_spectrum").get<std::vector<double>>();
  const RVector spectrum = blocks.D_spectrum();
  double spec_err = 0.0;
  for (Eigen::Index k = 0; k < spectrum.size(); ++k) {
    spec_err = std::max(spec_err, std::abs(spectrum(k) - stored.at(static_cast<std::size_t>(k))));
  }
  record("D_spectrum_reproduced", spec_err <= kReproduceTol, spec_err);
  record("D_hermitian", (blocks.D - blocks.D.adjoint()).norm() <= 1e-10, (blocks.D - blocks.D.adjoint()).norm());
  if (status == Status::Converged) {
    const double tol = report.at("options").at("tol").get<double>();
    record("residual_below_tol", blocks.residual() < tol, blocks.residual());
  }

  const json& oracle = report.at("oracle");
  if (oracle.contains("cutoff")) {
    const int cutoff = oracle.at("cutoff").get<int>();
    const long cap = report.at("options").value("max_dimension", kDefaultDimensionCap);
    const json fresh = oracle_json(H, U, blocks.B.real(), cutoff, cap);
    if (fresh.contains("error")) {
      checks["oracle"] = {{"passed", false}, {"error", fresh.at("error")}};
      passed = false;
    } else {
      const double diff = std::abs(fresh.at("engine_minus_oracle").get<double>());
      record("engine_matches_oracle", diff < kEngineOracleTol, diff);
      const double gap = fresh.at("gap").get<double>();
      record("variational_bound", gap >= -kEngineOracleTol, gap);
      const double ground_diff =
          std::abs(fresh.at("ground_energy").get<double>() - oracle.at("ground_energy").get<double>());
      record("ground_energy_reproduced", ground_diff <= kReproduceTol, ground_diff);
    }
  }
  return {{"passed", passed}, {"status", to_string(status)}, {"checks", checks}};
}

json certify_report(json report, double fd_step) {
  const WickPolynomial H = parse_hamiltonian(report.at("hamiltonian")).poly;
  const Mode mode = report_mode(report);
  MinimizationResult res;
  res.U = map_from_json(report.at("map"));
  res.status = parse_status(report.at("status").get<std::string>());
  if (res.status != Status::Converged) throw Error("certification requires a converged run");
  res.blocks = residuals(H, res.U);
  res.energy = res.blocks.B.real();
  res.residual = res.blocks.residual();
  res.D_spectrum = res.blocks.D_spectrum();

  CertifyOptions co;
  co.fd_step = fd_step;
  co.cutoff = report.at("options").value("cutoff", kDefaultBoseCutoff);
  co.max_dimension = report.at("options").value("max_dimension", kDefaultDimensionCap);
  report["certification"] = certification_json(certify(res, H, mode, co), fd_step);
  return report;
}

}  // namespace qfree
