#pragma once

#include <compare>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qfree/types.h"

namespace qfree {

// Mode indices are 0-based in the library; files and the CLI use 1-based.
using IndexList = std::vector<int>;

// Key of one Wick monomial a*_{c1}...a*_{ck} a_{a1}...a_{am}. Both lists are
// sorted non-decreasing (Bose) or strictly increasing (Fermi).
struct TermKey {
  IndexList creation;
  IndexList annihilation;

  int degree() const { return static_cast<int>(creation.size() + annihilation.size()); }
  auto operator<=>(const TermKey&) const = default;
  bool operator==(const TermKey&) const = default;
};

std::string to_string(const TermKey& key);

enum class Parity { Even, Odd, Mixed };

const char* to_string(Parity p);

// Sorts both index lists. For fermions the coefficient picks up the sign of
// the sorting permutation and a repeated index yields a zero coefficient.
std::pair<TermKey, Complex> canonicalize_term(Statistics stats, int n_modes, IndexList creation,
                                              IndexList annihilation, Complex coeff);

class WickPolynomial {
 public:
  using TermMap = std::map<TermKey, Complex>;

  WickPolynomial(int n_modes, Statistics stats);

  int n_modes() const { return n_modes_; }
  Statistics stats() const { return stats_; }
  const TermMap& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  // Highest total degree present; 0 for the empty polynomial.
  int degree() const;

  Complex coefficient(const TermKey& key) const;

  // Accumulates into the canonical slot. Throws RangeError on a bad index and
  // DegreeError above kMaxDegree.
  WickPolynomial& add(const IndexList& creation, const IndexList& annihilation, Complex coeff);

  // Accumulates an already-canonical key without re-sorting.
  WickPolynomial& add_canonical(const TermKey& key, Complex coeff);

  WickPolynomial& operator+=(const WickPolynomial& other);
  WickPolynomial& operator-=(const WickPolynomial& other);
  WickPolynomial& operator*=(Complex scale);

  // Operator adjoint, re-canonicalized.
  WickPolynomial adjoint() const;

  // Keeps only terms of the given total degree.
  WickPolynomial degree_part(int degree) const;

  // Largest coefficientwise difference.
  double max_abs_difference(const WickPolynomial& other) const;

 private:
  void check_compatible(const WickPolynomial& other) const;

  int n_modes_;
  Statistics stats_;
  TermMap terms_;
};

WickPolynomial operator+(WickPolynomial lhs, const WickPolynomial& rhs);
WickPolynomial operator-(WickPolynomial lhs, const WickPolynomial& rhs);
WickPolynomial operator*(Complex scale, WickPolynomial poly);

WickPolynomial add_term(WickPolynomial poly, const IndexList& creation, const IndexList& annihilation,
                        Complex coeff);

Parity parity(const WickPolynomial& poly);

bool is_hermitian(const WickPolynomial& poly, double tol);

/// Wick-ordered quasiparticle decomposition
///
///   B + Σ K̄_i b_i + Σ K_i b*_i + Σ O_ij b*_j b*_i + Σ Ō_ij b_i b_j + Σ D_ij b*_i b_j + remainder.
///
/// O is symmetric (Bose) or antisymmetric (Fermi). The b_i and b_i b_j
/// coefficients are kept separately in `K_lower` (Σ K_lower_i b_i) and
/// `O_lower` (Σ O_lower_ij b_i b_j) so that reassembly is exact for any input;
/// for a Hermitian polynomial they equal conj(K) and conj(O).
struct TransformedBlocks {
  Statistics stats = Statistics::Bose;
  Complex B{};
  CVector K;
  CVector K_lower;
  CMatrix O;
  CMatrix O_lower;
  CMatrix D;
  WickPolynomial remainder{1, Statistics::Bose};

  double norm_K() const { return K.norm(); }
  double norm_O() const { return O.norm(); }
  // ‖K‖₂ + ‖O‖_F
  double residual() const { return norm_K() + norm_O(); }

  // Deviation from the Hermitian pairing K_lower = K̄, O_lower = Ō.
  double conjugate_defect() const;

  // Eigenvalues of the Hermitian part of D, ascending.
  RVector D_spectrum() const;
};

TransformedBlocks extract_blocks(const WickPolynomial& poly);

WickPolynomial reassemble(const TransformedBlocks& blocks);

}  // namespace qfree
