#include "qfree/bogoliubov.h"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

namespace qfree {

namespace {

void check_same_group(const BogoliubovMap& a, const BogoliubovMap& b) {
  if (a.stats != b.stats || a.n_modes() != b.n_modes()) {
    throw MismatchError("Bogoliubov maps differ in statistics or mode count");
  }
}

Parity add_parity(Parity a, Parity b) { return a == b ? Parity::Even : Parity::Odd; }

// Applies f(√λ)/√λ to the eigenvalues λ of the positive matrix θθ*.
CMatrix chart_function(const CMatrix& theta, bool fermi) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(theta * theta.adjoint());
  RVector f(es.eigenvalues().size());
  for (Eigen::Index k = 0; k < f.size(); ++k) {
    const double s = std::sqrt(std::max(es.eigenvalues()(k), 0.0));
    if (s < 1e-8) {
      // tanh(s)/s = 1 - s²/3, tan(s)/s = 1 + s²/3
      f(k) = fermi ? 1.0 + s * s / 3.0 : 1.0 - s * s / 3.0;
    } else {
      f(k) = (fermi ? std::tan(s) : std::tanh(s)) / s;
    }
  }
  return es.eigenvectors() * f.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

CMatrix BogoliubovMap::doubled() const {
  const int n = n_modes();
  CMatrix t(2 * n, 2 * n);
  t << p, q, q.conjugate(), p.conjugate();
  return t;
}

double BogoliubovMap::group_residual() const {
  const int n = n_modes();
  const double s = stats == Statistics::Bose ? -1.0 : 1.0;
  const CMatrix id = CMatrix::Identity(n, n);
  const double r1 = (p * p.adjoint() + s * q * q.adjoint() - id).norm();
  const double r2 = (p * q.transpose() + s * q * p.transpose()).norm();
  return std::max(r1, r2);
}

Generator Generator::zero(int n, Statistics stats) { return {stats, CMatrix::Zero(n, n), CVector::Zero(n)}; }

void check_generator(const Generator& g) {
  const int n = g.n_modes();
  if (g.theta.cols() != n || g.y.size() != n) throw MismatchError("generator blocks have inconsistent sizes");
  const double s = g.stats == Statistics::Bose ? 1.0 : -1.0;
  const double asym = (g.theta - s * g.theta.transpose()).norm();
  if (asym > 1e-12 * std::max(1.0, g.theta.norm())) {
    throw Error(std::string("generator θ must be ") + (g.stats == Statistics::Bose ? "symmetric" : "antisymmetric"));
  }
  if (g.stats == Statistics::Fermi && g.y.norm() != 0.0) {
    throw Error("fermionic generators carry no displacement");
  }
}

BogoliubovMap identity(int n, Statistics stats) {
  if (n < 1) throw RangeError("need at least one mode");
  return {stats, CMatrix::Identity(n, n), CMatrix::Zero(n, n), CVector::Zero(n), Parity::Even};
}

BogoliubovMap compose(const BogoliubovMap& m1, const BogoliubovMap& m2) {
  check_same_group(m1, m2);
  // U1 U2 a U2* U1* = p2 (U1 a U1*) + q2 (U1 a* U1*) + ξ2
  BogoliubovMap out;
  out.stats = m1.stats;
  out.p = m2.p * m1.p + m2.q * m1.q.conjugate();
  out.q = m2.p * m1.q + m2.q * m1.p.conjugate();
  out.xi = m2.p * m1.xi + m2.q * m1.xi.conjugate() + m2.xi;
  out.parity = add_parity(m1.parity, m2.parity);
  return out;
}

BogoliubovMap inverse(const BogoliubovMap& m) {
  BogoliubovMap out;
  out.stats = m.stats;
  out.p = m.p.adjoint();
  out.q = m.stats == Statistics::Bose ? CMatrix(-m.q.transpose()) : CMatrix(m.q.transpose());
  out.xi = -(out.p * m.xi + out.q * m.xi.conjugate());
  out.parity = m.parity;
  return out;
}

BogoliubovMap from_generator(const Generator& g) {
  check_generator(g);
  const int n = g.n_modes();
  const Complex i1(0.0, 1.0);
  // d/ds (a, a*) = A (a, a*) + d for the flow e^{isG} (a, a*) e^{-isG}
  const bool affine = g.stats == Statistics::Bose && g.y.norm() != 0.0;
  const int dim = 2 * n + (affine ? 1 : 0);
  CMatrix gen = CMatrix::Zero(dim, dim);
  gen.block(0, n, n, n) = -i1 * g.theta;
  gen.block(n, 0, n, n) = i1 * g.theta.conjugate();
  if (affine) {
    gen.block(0, 2 * n, n, 1) = -i1 * g.y;
    gen.block(n, 2 * n, n, 1) = i1 * g.y.conjugate();
  }
  const CMatrix e = gen.exp();

  BogoliubovMap out;
  out.stats = g.stats;
  out.p = e.block(0, 0, n, n);
  out.q = e.block(0, n, n, n);
  out.xi = affine ? CVector(e.block(0, 2 * n, n, 1)) : CVector::Zero(n);
  out.parity = Parity::Even;
  return out;
}

BogoliubovMap reflection(const CVector& y) {
  if (std::abs(y.norm() - 1.0) > 1e-12) throw Error("reflection vector must have unit norm");
  const int n = static_cast<int>(y.size());
  // R a_k R = -a_k + y_k (y_j a*_j + ȳ_j a_j)
  BogoliubovMap out;
  out.stats = Statistics::Fermi;
  out.p = -CMatrix::Identity(n, n) + y * y.adjoint();
  out.q = y * y.transpose();
  out.xi = CVector::Zero(n);
  out.parity = Parity::Odd;
  return out;
}

BogoliubovMap number_conserving(Statistics stats, const CMatrix& unitary) {
  const int n = static_cast<int>(unitary.rows());
  if ((unitary * unitary.adjoint() - CMatrix::Identity(n, n)).norm() > 1e-10) {
    throw Error("gauge map must be unitary");
  }
  return {stats, unitary, CMatrix::Zero(n, n), CVector::Zero(n), Parity::Even};
}

ThoulessChart c_from_theta(const Generator& g) {
  check_generator(g);
  const bool fermi = g.stats == Statistics::Fermi;
  const int n = g.n_modes();
  if (fermi) {
    Eigen::JacobiSVD<CMatrix> svd(g.theta);
    if (svd.singularValues()(0) >= std::numbers::pi / 2) {
      throw ChartDomainError("fermionic chart requires ‖θ‖ < π/2");
    }
  }
  ThoulessChart chart;
  chart.stats = g.stats;
  chart.c = Complex(0.0, 1.0) * chart_function(g.theta, fermi) * g.theta;
  chart.c = 0.5 * (chart.c + (fermi ? -1.0 : 1.0) * chart.c.transpose());
  chart.y = CVector::Zero(n);
  if (!fermi && g.y.norm() != 0.0) chart.y = chart_from_map(from_generator(g)).y;
  return chart;
}

ThoulessChart chart_from_map(const BogoliubovMap& m) {
  const int n = m.n_modes();
  const bool fermi = m.stats == Statistics::Fermi;
  Eigen::JacobiSVD<CMatrix> svd(m.p);
  const RVector& sv = svd.singularValues();
  const double threshold = 1e-10 * sv(0);
  int deficiency = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) <= threshold || sv(0) == 0.0) ++deficiency;
  }
  if (deficiency > 0) {
    throw DegeneracyError("state has no Thouless chart: p-block rank deficiency " + std::to_string(deficiency) +
                          " of " + std::to_string(n));
  }
  Eigen::PartialPivLU<CMatrix> lu(m.p);

  ThoulessChart chart;
  chart.stats = m.stats;
  // b ∝ a − c a* − i(y + cȳ) annihilates the chart state.
  chart.c = -lu.solve(m.q);
  chart.c = 0.5 * (chart.c + (fermi ? -1.0 : 1.0) * chart.c.transpose());
  chart.y = CVector::Zero(n);
  if (!fermi && m.xi.norm() != 0.0) {
    const CVector w = lu.solve(m.xi);
    const Complex i1(0.0, 1.0);
    const CVector rhs = i1 * w - chart.c * (i1 * w).conjugate();
    const CMatrix lhs = CMatrix::Identity(n, n) - chart.c * chart.c.conjugate();
    chart.y = lhs.partialPivLu().solve(rhs);
  }
  return chart;
}

double sampled_form_defect(const BogoliubovMap& m, std::mt19937_64& rng, int samples) {
  std::normal_distribution<double> gauss;
  const int n = m.n_modes();
  auto random_vector = [&] {
    CVector z(n);
    for (int i = 0; i < n; ++i) z(i) = Complex(gauss(rng), gauss(rng));
    return z;
  };
  auto image = [&](const CVector& z) -> CVector { return m.p * z + m.q * z.conjugate(); };
  const bool bose = m.stats == Statistics::Bose;
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const CVector z = random_vector();
    const CVector w = random_vector();
    const Complex before = z.dot(w);
    const Complex after = image(z).dot(image(w));
    const double d = bose ? std::abs(before.imag() - after.imag()) : std::abs(before.real() - after.real());
    worst = std::max(worst, d / std::max(1.0, z.norm() * w.norm()));
  }
  return worst;
}

CMatrix random_unitary(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  CMatrix z(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) z(i, j) = Complex(gauss(rng), gauss(rng));
  }
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  return q;
}

}  // namespace qfree
