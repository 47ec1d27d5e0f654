#pragma once

#include <utility>
#include <vector>

#include "qfree/bogoliubov.h"
#include "qfree/normal_order.h"
#include "qfree/wick_poly.h"

namespace qfree {

inline constexpr long kDefaultDimensionCap = 4096;
inline constexpr int kDefaultBoseCutoff = 10;
inline constexpr double kDefaultTailTolerance = 1e-10;

/// Truncated occupation-number basis. Mode 0 varies fastest:
/// index = Σ n_i · stride_i. Fermionic modes have cutoff 1.
class FockBasis {
 public:
  FockBasis(Statistics stats, int n_modes, int cutoff = kDefaultBoseCutoff, long max_dimension = kDefaultDimensionCap);
  FockBasis(Statistics stats, std::vector<int> cutoffs, long max_dimension = kDefaultDimensionCap);

  Statistics stats() const { return stats_; }
  int n_modes() const { return static_cast<int>(cutoffs_.size()); }
  const std::vector<int>& cutoffs() const { return cutoffs_; }
  long dimension() const { return dimension_; }

  std::vector<int> occupations(long index) const;
  long index_of(const std::vector<int>& occupations) const;

  // Applies a_mode (or a*_mode) to a basis state. Returns {-1, 0} when the
  // result is zero or leaves the truncated space.
  std::pair<long, double> apply(const Ladder& op, long index) const;

 private:
  void init(long max_dimension);

  Statistics stats_;
  std::vector<int> cutoffs_;
  std::vector<long> strides_;
  long dimension_ = 1;
};

struct FockVector {
  FockBasis basis;
  CVector amplitudes;
  // Weight missing from the truncated space before normalization.
  double tail = 0.0;
};

FockVector vacuum(const FockBasis& basis);

// (annihilation, creation) dense matrices, one pair per mode.
std::vector<std::pair<CMatrix, CMatrix>> build_ladders(const FockBasis& basis);

// Dense matrix of Σ h (a*)^α a^β. Within the truncated space this is exactly
// the compression of the operator.
CMatrix quantize(const WickPolynomial& poly, const FockBasis& basis);

// Matrix-free action of the quantized polynomial.
CVector apply_polynomial(const WickPolynomial& poly, const FockBasis& basis, const CVector& v);

// Normalized chart vector; throws TruncationError when the tail exceeds tail_tol.
FockVector gaussian_vector(const ThoulessChart& chart, const FockBasis& basis,
                           double tail_tol = kDefaultTailTolerance);

// e^{i(X_θ + φ(y))} v on the truncated space.
FockVector exp_generator(const Generator& g, const FockBasis& basis, const FockVector& v);

// Vector of the state U Ω for any map. Fermions use the common null vector
// of the b_i, so degenerate and odd states are covered; bosons go through the
// Thouless chart.
FockVector map_vector(const BogoliubovMap& m, const FockBasis& basis, double tail_tol = kDefaultTailTolerance);

Complex expectation(const FockVector& v, const CMatrix& m);

// Lowest eigenvalue of the Hermitian part of the quantized polynomial.
double ground_energy(const WickPolynomial& poly, const FockBasis& basis);

// The quantized generator i(X_θ + φ(y)) as a polynomial (for oracle use).
WickPolynomial generator_polynomial(const Generator& g);

}  // namespace qfree
