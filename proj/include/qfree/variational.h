#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qfree/bogoliubov.h"
#include "qfree/fock_oracle.h"
#include "qfree/wick_poly.h"

namespace qfree {

// Which family of pure Gaussian states the energy is minimized over.
enum class Mode { BoseEven, BoseFull, FermiEven, FermiOdd };

const char* to_string(Mode mode);
Mode parse_mode(const std::string& text);
Statistics statistics_of(Mode mode);

enum class Status { Converged, MaxIterations, UnboundedBelow };

const char* to_string(Status status);

struct MinimizeOptions {
  double tol_grad = 1e-8;
  int max_iterations = 5000;
  // Armijo backtracking
  double initial_step = 0.5;
  double shrink = 0.5;
  double armijo = 1e-4;
  // Trial steps never exceed this generator norm.
  double max_step_norm = 1.0;
  // Unbounded-below detection
  double energy_floor = -1e6;
  double q_norm_cap = 1e4;
  // Multistart: the base starts plus this many seeded random perturbations.
  int random_starts = 4;
  double start_scale = 0.1;
  std::uint64_t seed = 42;
  // FermiOdd: start from this reflection instead of the coordinate ones.
  std::optional<CVector> odd_reflection;
};

struct MinimizationResult {
  BogoliubovMap U;
  TransformedBlocks blocks;
  double energy = 0.0;
  RVector D_spectrum;
  double residual = 0.0;
  int iterations = 0;
  Status status = Status::MaxIterations;
  // Engine energy at every accepted iterate, starting point first.
  std::vector<double> energy_trace;
  int starts_tried = 0;
};

// Blocks of the polynomial h̃ with H = h̃(b*, b), b = U a U*. Terms above
// max_degree are not computed (the B, K, O, D blocks are always exact).
TransformedBlocks residuals(const WickPolynomial& H, const BogoliubovMap& U, int max_degree = kMaxDegree);

// θ = iσO (σ = +1 Bose, −1 Fermi) and, for BoseFull, y = iK.
Generator descent_direction(const TransformedBlocks& blocks, Mode mode);

// First-order energy change d/ds E(U e^{is(X_θ+φ(y))}Ω) at s = 0:
// 2σ·Im Σ θ̄_ij O_ij + 2·Im Σ ȳ_i K_i.
double directional_derivative(const TransformedBlocks& blocks, const Generator& g);

// Throws if H is not Hermitian or its parity is not admissible for mode.
void check_admissible(const WickPolynomial& H, Mode mode);

// Single descent run from U0.
MinimizationResult minimize_from(const WickPolynomial& H, Mode mode, const BogoliubovMap& U0,
                                 const MinimizeOptions& opts = {});

// Multistart minimization; returns the best run.
MinimizationResult minimize(const WickPolynomial& H, Mode mode, const MinimizeOptions& opts = {});

// Random generator in the tangent space of `mode`, unit norm.
Generator random_direction(int n, Mode mode, std::mt19937_64& rng);

struct CheckOutcome {
  bool passed = false;
  bool skipped = false;
  double worst = 0.0;
  std::string detail;
};

struct CertifyOptions {
  double fd_step = 1e-3;
  int fd_directions = 10;
  int quadratic_directions = 3;
  int gauge_samples = 5;
  double gauge_tol = 1e-8;
  double quadratic_rel_tol = 0.05;
  int cutoff = kDefaultBoseCutoff;
  long max_dimension = kDefaultDimensionCap;
  double tail_tol = kDefaultTailTolerance;
  std::uint64_t seed = 7;
};

struct Certification {
  double norm_K = 0.0;
  double norm_O = 0.0;
  CheckOutcome fd_check;
  CheckOutcome quadratic_check;
  CheckOutcome gauge_check;

  bool passed() const;
};

// Fock-space oracle energy of the state U Ω, growing the Bose cutoff from
// `cutoff` until the chart vector tail is below tail_tol. Returns the cutoff
// that was used through `used_cutoff`.
double oracle_energy(const WickPolynomial& H, const BogoliubovMap& U, int cutoff, long max_dimension,
                     double tail_tol, int* used_cutoff = nullptr);

Certification certify(const MinimizationResult& result, const WickPolynomial& H, Mode mode,
                      const CertifyOptions& opts = {});

}  // namespace qfree
