#pragma once

#include <random>

#include "qfree/wick_poly.h"

namespace qfree {

/// Bogoliubov transformation b = U a U*:
///
///   b_i  = p_ij a_j + q_ij a*_j + ξ_i
///   b*_i = p̄_ij a*_j + q̄_ij a_j + ξ̄_i
///
/// ξ is identically zero for fermions. `parity` distinguishes the two Pin
/// components for fermions and is always Even for bosons.
struct BogoliubovMap {
  Statistics stats = Statistics::Bose;
  CMatrix p;
  CMatrix q;
  CVector xi;
  Parity parity = Parity::Even;

  int n_modes() const { return static_cast<int>(p.rows()); }

  // [[p, q], [q̄, p̄]] acting on (a, a*).
  CMatrix doubled() const;

  // Bose: max(‖pp† − qq† − I‖, ‖pqᵀ − qpᵀ‖); Fermi: the same with + signs.
  double group_residual() const;
};

/// Anti-Hermitian direction i(X_θ + φ(y)) with
/// X_θ = ½(θ_ij a*_i a*_j + θ̄_ij a_j a_i) and φ(y) = y_i a*_i + ȳ_i a_i.
/// θ is symmetric (Bose) or antisymmetric (Fermi); y is zero for fermions.
struct Generator {
  Statistics stats = Statistics::Bose;
  CMatrix theta;
  CVector y;

  static Generator zero(int n, Statistics stats);
  int n_modes() const { return static_cast<int>(theta.rows()); }
  double norm() const { return std::sqrt(theta.squaredNorm() + y.squaredNorm()); }
  Generator scaled(double s) const { return {stats, s * theta, s * y}; }
};

/// State det-factor · e^{iφ(y)} e^{½ c_ij a*_i a*_j} Ω.
struct ThoulessChart {
  Statistics stats = Statistics::Bose;
  CMatrix c;
  CVector y;
};

BogoliubovMap identity(int n, Statistics stats);

// The map of U1·U2, i.e. U2 applied first to a state.
BogoliubovMap compose(const BogoliubovMap& m1, const BogoliubovMap& m2);

BogoliubovMap inverse(const BogoliubovMap& m);

// Conjugation by e^{i(X_θ + φ(y))}.
BogoliubovMap from_generator(const Generator& g);

// Fermionic reflection by the unitary y_i a*_i + ȳ_i a_i, ‖y‖ = 1. Odd.
BogoliubovMap reflection(const CVector& y);

// Gauge map: p unitary, q = 0, ξ = 0.
BogoliubovMap number_conserving(Statistics stats, const CMatrix& unitary);

ThoulessChart c_from_theta(const Generator& g);

ThoulessChart chart_from_map(const BogoliubovMap& m);

// Largest change of the invariant form (Bose: Im(z|z'), Fermi: Re(z|z'))
// over `samples` random pairs of phase-space vectors.
double sampled_form_defect(const BogoliubovMap& m, std::mt19937_64& rng, int samples = 20);

// Haar-like random unitary via QR of a complex Gaussian matrix.
CMatrix random_unitary(int n, std::mt19937_64& rng);

void check_generator(const Generator& g);

}  // namespace qfree
