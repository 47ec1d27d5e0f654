#include "qfree/wick_poly.h"

#include <algorithm>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace qfree {

namespace {

// Insertion sort that counts transpositions. Returns false on a repeated
// index when `strict` is set.
bool sort_with_sign(IndexList& idx, int& sign, bool strict) {
  for (std::size_t i = 1; i < idx.size(); ++i) {
    std::size_t j = i;
    while (j > 0 && idx[j] < idx[j - 1]) {
      std::swap(idx[j], idx[j - 1]);
      sign = -sign;
      --j;
    }
  }
  if (strict) {
    for (std::size_t i = 1; i < idx.size(); ++i) {
      if (idx[i] == idx[i - 1]) return false;
    }
  }
  return true;
}

void check_range(const IndexList& idx, int n_modes) {
  for (int i : idx) {
    if (i < 0 || i >= n_modes) {
      throw RangeError("mode index " + std::to_string(i + 1) + " outside 1.." + std::to_string(n_modes));
    }
  }
}

}  // namespace

std::string to_string(const TermKey& key) {
  std::ostringstream os;
  for (int i : key.creation) os << "a*" << i + 1 << ' ';
  for (int i : key.annihilation) os << "a" << i + 1 << ' ';
  std::string s = os.str();
  if (s.empty()) return "1";
  s.pop_back();
  return s;
}

const char* to_string(Parity p) {
  switch (p) {
    case Parity::Even:
      return "even";
    case Parity::Odd:
      return "odd";
    case Parity::Mixed:
      return "mixed";
  }
  return "?";
}

std::pair<TermKey, Complex> canonicalize_term(Statistics stats, int n_modes, IndexList creation,
                                              IndexList annihilation, Complex coeff) {
  check_range(creation, n_modes);
  check_range(annihilation, n_modes);
  const bool fermi = stats == Statistics::Fermi;
  int sign = 1;
  bool ok = sort_with_sign(creation, sign, fermi);
  ok = sort_with_sign(annihilation, sign, fermi) && ok;
  TermKey key{std::move(creation), std::move(annihilation)};
  if (!ok) return {std::move(key), Complex{}};
  if (fermi && sign < 0) coeff = -coeff;
  return {std::move(key), coeff};
}

WickPolynomial::WickPolynomial(int n_modes, Statistics stats) : n_modes_(n_modes), stats_(stats) {
  if (n_modes < 1) throw RangeError("a polynomial needs at least one mode");
}

int WickPolynomial::degree() const {
  int d = 0;
  for (const auto& [key, c] : terms_) d = std::max(d, key.degree());
  return d;
}

Complex WickPolynomial::coefficient(const TermKey& key) const {
  auto it = terms_.find(key);
  return it == terms_.end() ? Complex{} : it->second;
}

WickPolynomial& WickPolynomial::add(const IndexList& creation, const IndexList& annihilation, Complex coeff) {
  auto [key, c] = canonicalize_term(stats_, n_modes_, creation, annihilation, coeff);
  return add_canonical(key, c);
}

WickPolynomial& WickPolynomial::add_canonical(const TermKey& key, Complex coeff) {
  if (key.degree() > kMaxDegree) {
    throw DegreeError("term " + to_string(key) + " exceeds the degree cap " + std::to_string(kMaxDegree));
  }
  if (std::abs(coeff) == 0.0) return *this;
  auto [it, inserted] = terms_.try_emplace(key, coeff);
  if (!inserted) it->second += coeff;
  if (std::abs(it->second) < kPruneThreshold) terms_.erase(it);
  return *this;
}

void WickPolynomial::check_compatible(const WickPolynomial& other) const {
  if (other.n_modes_ != n_modes_ || other.stats_ != stats_) {
    throw MismatchError("polynomials differ in mode count or statistics");
  }
}

WickPolynomial& WickPolynomial::operator+=(const WickPolynomial& other) {
  check_compatible(other);
  for (const auto& [key, c] : other.terms_) add_canonical(key, c);
  return *this;
}

WickPolynomial& WickPolynomial::operator-=(const WickPolynomial& other) {
  check_compatible(other);
  for (const auto& [key, c] : other.terms_) add_canonical(key, -c);
  return *this;
}

WickPolynomial& WickPolynomial::operator*=(Complex scale) {
  TermMap scaled;
  for (const auto& [key, c] : terms_) {
    Complex v = c * scale;
    if (std::abs(v) >= kPruneThreshold) scaled.emplace(key, v);
  }
  terms_ = std::move(scaled);
  return *this;
}

WickPolynomial WickPolynomial::adjoint() const {
  WickPolynomial out(n_modes_, stats_);
  for (const auto& [key, c] : terms_) {
    // (a*_{c1}..a*_{ck} a_{a1}..a_{am})* = a*_{am}..a*_{a1} a_{ck}..a_{c1}
    IndexList cr(key.annihilation.rbegin(), key.annihilation.rend());
    IndexList an(key.creation.rbegin(), key.creation.rend());
    out.add(cr, an, std::conj(c));
  }
  return out;
}

WickPolynomial WickPolynomial::degree_part(int degree) const {
  WickPolynomial out(n_modes_, stats_);
  for (const auto& [key, c] : terms_) {
    if (key.degree() == degree) out.terms_.emplace(key, c);
  }
  return out;
}

double WickPolynomial::max_abs_difference(const WickPolynomial& other) const {
  check_compatible(other);
  double worst = 0.0;
  for (const auto& [key, c] : terms_) worst = std::max(worst, std::abs(c - other.coefficient(key)));
  for (const auto& [key, c] : other.terms_) {
    if (!terms_.contains(key)) worst = std::max(worst, std::abs(c));
  }
  return worst;
}

WickPolynomial operator+(WickPolynomial lhs, const WickPolynomial& rhs) { return lhs += rhs; }
WickPolynomial operator-(WickPolynomial lhs, const WickPolynomial& rhs) { return lhs -= rhs; }
WickPolynomial operator*(Complex scale, WickPolynomial poly) { return poly *= scale; }

WickPolynomial add_term(WickPolynomial poly, const IndexList& creation, const IndexList& annihilation,
                        Complex coeff) {
  poly.add(creation, annihilation, coeff);
  return poly;
}

Parity parity(const WickPolynomial& poly) {
  bool has_even = false;
  bool has_odd = false;
  for (const auto& [key, c] : poly.terms()) (key.degree() % 2 == 0 ? has_even : has_odd) = true;
  if (has_odd && has_even) return Parity::Mixed;
  return has_odd ? Parity::Odd : Parity::Even;
}

bool is_hermitian(const WickPolynomial& poly, double tol) {
  return poly.max_abs_difference(poly.adjoint()) <= tol;
}

double TransformedBlocks::conjugate_defect() const {
  double d = (K_lower - K.conjugate()).cwiseAbs().maxCoeff();
  if (O.size() > 0) d = std::max(d, (O_lower - O.conjugate()).cwiseAbs().maxCoeff());
  return d;
}

RVector TransformedBlocks::D_spectrum() const {
  CMatrix h = 0.5 * (D + D.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

TransformedBlocks extract_blocks(const WickPolynomial& poly) {
  const int n = poly.n_modes();
  const bool fermi = poly.stats() == Statistics::Fermi;
  TransformedBlocks b;
  b.stats = poly.stats();
  b.K = CVector::Zero(n);
  b.K_lower = CVector::Zero(n);
  b.O = CMatrix::Zero(n, n);
  b.O_lower = CMatrix::Zero(n, n);
  b.D = CMatrix::Zero(n, n);
  b.remainder = WickPolynomial(n, poly.stats());

  for (const auto& [key, c] : poly.terms()) {
    const auto nc = key.creation.size();
    const auto na = key.annihilation.size();
    if (nc + na == 0) {
      b.B = c;
    } else if (nc == 1 && na == 0) {
      b.K(key.creation[0]) = c;
    } else if (nc == 0 && na == 1) {
      b.K_lower(key.annihilation[0]) = c;
    } else if (nc == 1 && na == 1) {
      b.D(key.creation[0], key.annihilation[0]) = c;
    } else if (nc == 2 && na == 0) {
      // c a*_i a*_j (i <= j) = Σ O_ij a*_j a*_i
      const int i = key.creation[0];
      const int j = key.creation[1];
      if (i == j) {
        b.O(i, i) = c;
      } else if (fermi) {
        b.O(i, j) = -0.5 * c;
        b.O(j, i) = 0.5 * c;
      } else {
        b.O(i, j) = b.O(j, i) = 0.5 * c;
      }
    } else if (nc == 0 && na == 2) {
      // c a_i a_j (i <= j) = Σ P_ij a_i a_j
      const int i = key.annihilation[0];
      const int j = key.annihilation[1];
      if (i == j) {
        b.O_lower(i, i) = c;
      } else if (fermi) {
        b.O_lower(i, j) = 0.5 * c;
        b.O_lower(j, i) = -0.5 * c;
      } else {
        b.O_lower(i, j) = b.O_lower(j, i) = 0.5 * c;
      }
    } else {
      b.remainder.add_canonical(key, c);
    }
  }
  return b;
}

WickPolynomial reassemble(const TransformedBlocks& b) {
  WickPolynomial out = b.remainder;
  const int n = out.n_modes();
  out.add({}, {}, b.B);
  for (int i = 0; i < n; ++i) {
    out.add({i}, {}, b.K(i));
    out.add({}, {i}, b.K_lower(i));
    for (int j = 0; j < n; ++j) {
      out.add({j, i}, {}, b.O(i, j));
      out.add({}, {i, j}, b.O_lower(i, j));
      out.add({i}, {j}, b.D(i, j));
    }
  }
  return out;
}

}  // namespace qfree
