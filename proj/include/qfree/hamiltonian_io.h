#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "qfree/wick_poly.h"

namespace qfree {

class ParseError : public Error {
 public:
  using Error::Error;
};

// Optional solver settings carried inside a Hamiltonian file.
struct SpecOptions {
  std::optional<int> cutoff;
  std::optional<double> tol;
};

struct ParsedHamiltonian {
  WickPolynomial poly;
  SpecOptions options;
};

/// Reads the JSON Hamiltonian format
///
///   {"statistics": "bose"|"fermi", "modes": n,
///    "terms": [{"creation": [..], "annihilation": [..], "coeff": [re, im]}, ...],
///    "hermitian_complete": false, "options": {"cutoff": 10, "tol": 1e-8}}
///
/// Indices are 1-based. With completion (file flag or `hermitian_complete`)
/// the conjugate of every term whose conjugate is not listed is added.
ParsedHamiltonian parse_hamiltonian(const nlohmann::json& doc, bool hermitian_complete = false);
ParsedHamiltonian parse_hamiltonian_file(const std::filesystem::path& path, bool hermitian_complete = false);

nlohmann::json serialize_hamiltonian(const WickPolynomial& poly);

WickPolynomial hermitian_completion(const WickPolynomial& poly);

}  // namespace qfree
