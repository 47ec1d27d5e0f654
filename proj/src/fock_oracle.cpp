#include "qfree/fock_oracle.h"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace qfree {

namespace {

// Coefficient of Σ h (a*)^α a^β applied to basis state `index`: the target
// index and amplitude of one monomial.
std::pair<long, double> apply_key(const TermKey& key, const FockBasis& basis, long index) {
  double amp = 1.0;
  for (auto it = key.annihilation.rbegin(); it != key.annihilation.rend(); ++it) {
    auto [next, a] = basis.apply({*it, false}, index);
    if (next < 0) return {-1, 0.0};
    index = next;
    amp *= a;
  }
  for (auto it = key.creation.rbegin(); it != key.creation.rend(); ++it) {
    auto [next, a] = basis.apply({*it, true}, index);
    if (next < 0) return {-1, 0.0};
    index = next;
    amp *= a;
  }
  return {index, amp};
}

void check_basis(const WickPolynomial& poly, const FockBasis& basis) {
  if (poly.n_modes() != basis.n_modes() || poly.stats() != basis.stats()) {
    throw MismatchError("polynomial and Fock basis differ in mode count or statistics");
  }
}

// e^{G} v by Taylor series on scaled substeps.
CVector exp_apply(const CMatrix& g, CVector v) {
  const double norm1 = g.cwiseAbs().colwise().sum().maxCoeff();
  const int steps = std::max(1, static_cast<int>(std::ceil(norm1 / 0.5)));
  const CMatrix h = g / static_cast<double>(steps);
  for (int s = 0; s < steps; ++s) {
    CVector term = v;
    CVector sum = v;
    for (int k = 1; k < 200; ++k) {
      term = h * term / static_cast<double>(k);
      sum += term;
      if (term.norm() <= 1e-18 * sum.norm()) break;
    }
    v = std::move(sum);
  }
  return v;
}

}  // namespace

FockBasis::FockBasis(Statistics stats, int n_modes, int cutoff, long max_dimension)
    : stats_(stats), cutoffs_(static_cast<std::size_t>(std::max(n_modes, 0)),
                              stats == Statistics::Fermi ? 1 : cutoff) {
  init(max_dimension);
}

FockBasis::FockBasis(Statistics stats, std::vector<int> cutoffs, long max_dimension)
    : stats_(stats), cutoffs_(std::move(cutoffs)) {
  if (stats_ == Statistics::Fermi) {
    for (int& c : cutoffs_) c = 1;
  }
  init(max_dimension);
}

void FockBasis::init(long max_dimension) {
  if (cutoffs_.empty()) throw RangeError("Fock basis needs at least one mode");
  strides_.resize(cutoffs_.size());
  dimension_ = 1;
  for (std::size_t i = 0; i < cutoffs_.size(); ++i) {
    if (cutoffs_[i] < 1) throw RangeError("occupation cutoff must be at least 1");
    strides_[i] = dimension_;
    dimension_ *= cutoffs_[i] + 1;
    if (dimension_ > max_dimension) {
      throw DimensionError("Fock dimension exceeds the cap of " + std::to_string(max_dimension));
    }
  }
}

std::vector<int> FockBasis::occupations(long index) const {
  std::vector<int> occ(cutoffs_.size());
  for (std::size_t i = 0; i < cutoffs_.size(); ++i) {
    occ[i] = static_cast<int>(index % (cutoffs_[i] + 1));
    index /= cutoffs_[i] + 1;
  }
  return occ;
}

long FockBasis::index_of(const std::vector<int>& occupations) const {
  long index = 0;
  for (std::size_t i = 0; i < cutoffs_.size(); ++i) index += occupations[i] * strides_[i];
  return index;
}

std::pair<long, double> FockBasis::apply(const Ladder& op, long index) const {
  const auto mode = static_cast<std::size_t>(op.mode);
  const int n = static_cast<int>((index / strides_[mode]) % (cutoffs_[mode] + 1));
  double amp = 0.0;
  long target = -1;
  if (op.dagger) {
    if (n >= cutoffs_[mode]) return {-1, 0.0};
    target = index + strides_[mode];
    amp = stats_ == Statistics::Bose ? std::sqrt(static_cast<double>(n + 1)) : 1.0;
  } else {
    if (n == 0) return {-1, 0.0};
    target = index - strides_[mode];
    amp = stats_ == Statistics::Bose ? std::sqrt(static_cast<double>(n)) : 1.0;
  }
  if (stats_ == Statistics::Fermi) {
    int occupied_below = 0;
    for (std::size_t j = 0; j < mode; ++j) occupied_below += static_cast<int>((index / strides_[j]) % 2);
    if (occupied_below % 2 == 1) amp = -amp;
  }
  return {target, amp};
}

FockVector vacuum(const FockBasis& basis) {
  CVector v = CVector::Zero(basis.dimension());
  v(0) = 1.0;
  return {basis, std::move(v), 0.0};
}

std::vector<std::pair<CMatrix, CMatrix>> build_ladders(const FockBasis& basis) {
  const long dim = basis.dimension();
  std::vector<std::pair<CMatrix, CMatrix>> out;
  for (int i = 0; i < basis.n_modes(); ++i) {
    CMatrix a = CMatrix::Zero(dim, dim);
    for (long col = 0; col < dim; ++col) {
      auto [row, amp] = basis.apply({i, false}, col);
      if (row >= 0) a(row, col) = amp;
    }
    CMatrix ad = a.adjoint();
    out.emplace_back(std::move(a), std::move(ad));
  }
  return out;
}

CMatrix quantize(const WickPolynomial& poly, const FockBasis& basis) {
  check_basis(poly, basis);
  const long dim = basis.dimension();
  CMatrix m = CMatrix::Zero(dim, dim);
  for (long col = 0; col < dim; ++col) {
    for (const auto& [key, h] : poly.terms()) {
      auto [row, amp] = apply_key(key, basis, col);
      if (row >= 0) m(row, col) += h * amp;
    }
  }
  return m;
}

CVector apply_polynomial(const WickPolynomial& poly, const FockBasis& basis, const CVector& v) {
  check_basis(poly, basis);
  CVector out = CVector::Zero(basis.dimension());
  for (long col = 0; col < basis.dimension(); ++col) {
    if (v(col) == Complex{}) continue;
    for (const auto& [key, h] : poly.terms()) {
      auto [row, amp] = apply_key(key, basis, col);
      if (row >= 0) out(row) += h * amp * v(col);
    }
  }
  return out;
}

FockVector gaussian_vector(const ThoulessChart& chart, const FockBasis& basis, double tail_tol) {
  const int n = basis.n_modes();
  if (chart.stats != basis.stats() || chart.c.rows() != n) {
    throw MismatchError("chart and Fock basis differ in mode count or statistics");
  }
  const bool fermi = chart.stats == Statistics::Fermi;
  const CMatrix ctc = chart.c.adjoint() * chart.c;
  const CMatrix id = CMatrix::Identity(n, n);
  if (!fermi) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(ctc, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().maxCoeff() >= 1.0) throw ChartDomainError("bosonic chart requires ‖c‖ < 1");
  }
  // Normalization det(1 ∓ c*c)^{±1/4}; the determinant is real positive.
  const double det = std::real((fermi ? CMatrix(id + ctc) : CMatrix(id - ctc)).determinant());
  Complex prefactor = std::pow(det, fermi ? -0.25 : 0.25);

  // Raising-only exponent ½ c_ij a*_i a*_j + z_i a*_i, z = i(y + cȳ).
  WickPolynomial exponent(n, chart.stats);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) exponent.add({i, j}, {}, 0.5 * chart.c(i, j));
  }
  if (!fermi && chart.y.size() == n && chart.y.norm() != 0.0) {
    const Complex i1(0.0, 1.0);
    const CVector z = i1 * (chart.y + chart.c * chart.y.conjugate());
    for (int i = 0; i < n; ++i) exponent.add({i}, {}, z(i));
    const Complex ycy = (chart.y.conjugate().transpose() * chart.c * chart.y.conjugate())(0, 0);
    prefactor *= std::exp(-0.5 * chart.y.squaredNorm() - 0.5 * ycy);
  }

  FockVector out = vacuum(basis);
  CVector term = out.amplitudes;
  CVector sum = term;
  for (int k = 1; k <= 4 * kMaxDegree + basis.dimension(); ++k) {
    term = apply_polynomial(exponent, basis, term) / static_cast<double>(k);
    if (term.norm() == 0.0) break;
    sum += term;
  }
  out.amplitudes = prefactor * sum;
  const double norm2 = out.amplitudes.squaredNorm();
  out.tail = std::abs(1.0 - norm2);
  if (out.tail > tail_tol) {
    throw TruncationError("Gaussian vector tail " + std::to_string(out.tail) + " exceeds tolerance at this cutoff");
  }
  out.amplitudes /= std::sqrt(norm2);
  return out;
}

WickPolynomial generator_polynomial(const Generator& g) {
  check_generator(g);
  const int n = g.n_modes();
  const Complex i1(0.0, 1.0);
  WickPolynomial poly(n, g.stats);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      poly.add({i, j}, {}, i1 * 0.5 * g.theta(i, j));
      poly.add({}, {j, i}, i1 * 0.5 * std::conj(g.theta(i, j)));
    }
    if (g.stats == Statistics::Bose) {
      poly.add({i}, {}, i1 * g.y(i));
      poly.add({}, {i}, i1 * std::conj(g.y(i)));
    }
  }
  return poly;
}

FockVector exp_generator(const Generator& g, const FockBasis& basis, const FockVector& v) {
  const CMatrix gen = quantize(generator_polynomial(g), basis);
  return {basis, exp_apply(gen, v.amplitudes), v.tail};
}

FockVector map_vector(const BogoliubovMap& m, const FockBasis& basis, double tail_tol) {
  if (m.stats == Statistics::Bose) return gaussian_vector(chart_from_map(m), basis, tail_tol);

  const int n = basis.n_modes();
  const auto ladders = build_ladders(basis);
  const long dim = basis.dimension();
  CMatrix number = CMatrix::Zero(dim, dim);
  for (int i = 0; i < n; ++i) {
    CMatrix b = CMatrix::Zero(dim, dim);
    for (int j = 0; j < n; ++j) b += m.p(i, j) * ladders[j].first + m.q(i, j) * ladders[j].second;
    number += b.adjoint() * b;
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(number);
  if (es.eigenvalues()(0) > 1e-8 || (dim > 1 && es.eigenvalues()(1) < 0.5)) {
    throw Error("map has no unique quasiparticle vacuum; not a valid Bogoliubov map");
  }
  return {basis, es.eigenvectors().col(0), 0.0};
}

Complex expectation(const FockVector& v, const CMatrix& m) {
  if (m.rows() != v.amplitudes.size() || m.cols() != v.amplitudes.size()) {
    throw MismatchError("vector and matrix dimensions differ");
  }
  return v.amplitudes.dot(m * v.amplitudes);
}

double ground_energy(const WickPolynomial& poly, const FockBasis& basis) {
  const CMatrix h = quantize(poly, basis);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace qfree
