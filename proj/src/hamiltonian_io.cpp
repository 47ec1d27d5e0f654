#include "qfree/hamiltonian_io.h"

#include <fstream>
#include <set>

namespace qfree {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

IndexList read_indices(const json& node, const std::string& where, int n_modes, Statistics stats) {
  if (!node.is_array()) fail(where, "expected an array of mode indices");
  IndexList out;
  for (std::size_t k = 0; k < node.size(); ++k) {
    const json& v = node[k];
    if (!v.is_number_integer()) fail(where + "[" + std::to_string(k) + "]", "expected an integer");
    const int idx = v.get<int>();
    if (idx < 1 || idx > n_modes) {
      fail(where + "[" + std::to_string(k) + "]",
           "index " + std::to_string(idx) + " outside 1.." + std::to_string(n_modes));
    }
    out.push_back(idx - 1);
  }
  if (stats == Statistics::Fermi) {
    std::set<int> seen(out.begin(), out.end());
    if (seen.size() != out.size()) fail(where, "repeated fermionic index");
  }
  return out;
}

Complex read_coeff(const json& node, const std::string& where) {
  if (node.is_number()) return {node.get<double>(), 0.0};
  if (!node.is_array() || node.size() != 2 || !node[0].is_number() || !node[1].is_number()) {
    fail(where, "expected [re, im]");
  }
  return {node[0].get<double>(), node[1].get<double>()};
}

}  // namespace

WickPolynomial hermitian_completion(const WickPolynomial& poly) {
  WickPolynomial out = poly;
  const WickPolynomial adj = poly.adjoint();
  for (const auto& [key, c] : adj.terms()) {
    if (!poly.terms().contains(key)) out.add_canonical(key, c);
  }
  return out;
}

ParsedHamiltonian parse_hamiltonian(const json& doc, bool hermitian_complete) {
  if (!doc.is_object()) fail("<root>", "expected a JSON object");
  if (!doc.contains("statistics") || !doc["statistics"].is_string()) fail("statistics", "missing or not a string");
  const std::string st = doc["statistics"].get<std::string>();
  Statistics stats{};
  if (st == "bose") {
    stats = Statistics::Bose;
  } else if (st == "fermi") {
    stats = Statistics::Fermi;
  } else {
    fail("statistics", "must be \"bose\" or \"fermi\", got \"" + st + "\"");
  }
  if (!doc.contains("modes") || !doc["modes"].is_number_integer() || doc["modes"].get<int>() < 1) {
    fail("modes", "missing or not a positive integer");
  }
  const int n = doc["modes"].get<int>();
  if (!doc.contains("terms") || !doc["terms"].is_array()) fail("terms", "missing or not an array");

  WickPolynomial poly(n, stats);
  const json& terms = doc["terms"];
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const std::string where = "terms[" + std::to_string(t) + "]";
    const json& term = terms[t];
    if (!term.is_object()) fail(where, "expected an object");
    const IndexList cr = read_indices(term.value("creation", json::array()), where + ".creation", n, stats);
    const IndexList an = read_indices(term.value("annihilation", json::array()), where + ".annihilation", n, stats);
    if (!term.contains("coeff")) fail(where + ".coeff", "missing");
    const Complex c = read_coeff(term["coeff"], where + ".coeff");
    try {
      poly.add(cr, an, c);
    } catch (const DegreeError& e) {
      fail(where, e.what());
    }
  }

  if (doc.contains("hermitian_complete")) {
    if (!doc["hermitian_complete"].is_boolean()) fail("hermitian_complete", "expected a boolean");
    hermitian_complete = hermitian_complete || doc["hermitian_complete"].get<bool>();
  }
  if (hermitian_complete) poly = hermitian_completion(poly);
  if (!is_hermitian(poly, 1e-12)) {
    fail("terms", "Hamiltonian is not Hermitian (use --hermitian-complete to add conjugate terms)");
  }

  SpecOptions options;
  if (doc.contains("options")) {
    const json& o = doc["options"];
    if (!o.is_object()) fail("options", "expected an object");
    if (o.contains("cutoff")) {
      if (!o["cutoff"].is_number_integer() || o["cutoff"].get<int>() < 1) fail("options.cutoff", "expected a positive integer");
      options.cutoff = o["cutoff"].get<int>();
    }
    if (o.contains("tol")) {
      if (!o["tol"].is_number() || o["tol"].get<double>() <= 0) fail("options.tol", "expected a positive number");
      options.tol = o["tol"].get<double>();
    }
  }
  return {std::move(poly), options};
}

ParsedHamiltonian parse_hamiltonian_file(const std::filesystem::path& path, bool hermitian_complete) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": malformed JSON (" + e.what() + ")");
  }
  try {
    return parse_hamiltonian(doc, hermitian_complete);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

json serialize_hamiltonian(const WickPolynomial& poly) {
  json terms = json::array();
  for (const auto& [key, c] : poly.terms()) {
    json cr = json::array();
    json an = json::array();
    for (int i : key.creation) cr.push_back(i + 1);
    for (int i : key.annihilation) an.push_back(i + 1);
    terms.push_back({{"creation", cr}, {"annihilation", an}, {"coeff", {c.real(), c.imag()}}});
  }
  return {{"statistics", to_string(poly.stats())}, {"modes", poly.n_modes()}, {"terms", terms}};
}

}  // namespace qfree
