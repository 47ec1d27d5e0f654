#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qfree {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

enum class Statistics { Bose, Fermi };

inline const char* to_string(Statistics s) { return s == Statistics::Bose ? "bose" : "fermi"; }

// Exchange sign: +1 for bosons, -1 for fermions.
inline int exchange_sign(Statistics s) { return s == Statistics::Bose ? 1 : -1; }

// Coefficients below this magnitude are never stored.
inline constexpr double kPruneThreshold = 1e-14;

// Highest total degree a polynomial may carry.
inline constexpr int kMaxDegree = 8;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class MismatchError : public Error {
 public:
  using Error::Error;
};

class DegreeError : public Error {
 public:
  using Error::Error;
};

// Fermionic state has (numerically) zero overlap with the vacuum.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

class ChartDomainError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class TruncationError : public Error {
 public:
  using Error::Error;
};

}  // namespace qfree
