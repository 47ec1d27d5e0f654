#pragma once

#include <span>
#include <vector>

#include "qfree/wick_poly.h"

namespace qfree {

// A single ladder operator: a*_mode when `dagger`, a_mode otherwise.
struct Ladder {
  int mode = 0;
  bool dagger = false;
};

// Σ u_i b*_i + Σ v_i b_i + w
struct LinearOperator {
  CVector u;
  CVector v;
  Complex w{};

  static LinearOperator creation(int n, int i);
  static LinearOperator annihilation(int n, int i);
  int n_modes() const { return static_cast<int>(u.size()); }
};

enum class Side { Left, Right };

// Normal-orders coeff · word by commuting adjacent misordered pairs and
// emitting the CCR/CAR contraction terms.
WickPolynomial normal_order_word(Statistics stats, int n_modes, std::span<const Ladder> word, Complex coeff);

// Normal-ordered L·poly (Left) or poly·L (Right).
WickPolynomial multiply_linear(const WickPolynomial& poly, const LinearOperator& op, Side side);

// Normal-ordered operator product lhs·rhs.
WickPolynomial multiply(const WickPolynomial& lhs, const WickPolynomial& rhs);

struct SubstituteOptions {
  // Terms above this degree are dropped from the result (and intermediate
  // terms that can no longer contract down to it). kMaxDegree keeps all.
  int max_degree = kMaxDegree;
};

// Replaces every a_i by annihilation_subst[i] and every a*_i by
// creation_subst[i], expands, and normal-orders the result.
WickPolynomial substitute_linear(const WickPolynomial& poly, std::span<const LinearOperator> creation_subst,
                                 std::span<const LinearOperator> annihilation_subst,
                                 const SubstituteOptions& options = {});

// Vacuum expectation of a normal-ordered polynomial: its constant term.
Complex vacuum_expectation(const WickPolynomial& poly);

}  // namespace qfree
