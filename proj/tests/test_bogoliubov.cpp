#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qfree/bogoliubov.h"
#include "qfree/fock_oracle.h"
#include "qfree/variational.h"
#include "test_support.h"

using namespace qfree;
using qfree::testing::max_abs;
using qfree::testing::random_generator;
using qfree::testing::random_map;

namespace {

constexpr Complex kI(0.0, 1.0);

Generator bose_squeeze(double t) {
  Generator g = Generator::zero(1, Statistics::Bose);
  g.theta(0, 0) = kI * t;
  return g;
}

double map_distance(const BogoliubovMap& a, const BogoliubovMap& b) {
  return std::max({max_abs(a.p - b.p), max_abs(a.q - b.q), a.xi.size() ? max_abs(a.xi - b.xi) : 0.0});
}

// Dense e^{iG} built column by column from the oracle.
CMatrix dense_unitary(const Generator& g, const FockBasis& basis) {
  const long dim = basis.dimension();
  CMatrix u(dim, dim);
  for (long k = 0; k < dim; ++k) {
    FockVector e{basis, CVector::Zero(dim), 0.0};
    e.amplitudes(k) = 1.0;
    u.col(k) = exp_generator(g, basis, e).amplitudes;
  }
  return u;
}

// max over checked columns of |U a_i U* - (p a + q a* + ξ)_i|
double conjugation_error(const BogoliubovMap& m, const CMatrix& u, const FockBasis& basis, long max_col) {
  const auto lad = build_ladders(basis);
  const long dim = basis.dimension();
  double worst = 0.0;
  for (int i = 0; i < m.n_modes(); ++i) {
    const CMatrix lhs = u * lad[i].first * u.adjoint();
    CMatrix rhs = m.xi(i) * CMatrix::Identity(dim, dim);
    for (int j = 0; j < m.n_modes(); ++j) rhs += m.p(i, j) * lad[j].first + m.q(i, j) * lad[j].second;
    for (long c = 0; c < std::min(max_col, dim); ++c) worst = std::max(worst, (lhs.col(c) - rhs.col(c)).cwiseAbs().maxCoeff());
  }
  return worst;
}

double overlap(const FockVector& a, const FockVector& b) { return std::abs(a.amplitudes.dot(b.amplitudes)); }

}  // namespace

TEST_CASE("identity and its laws") {
  std::mt19937_64 rng(31);
  for (Statistics s : {Statistics::Bose, Statistics::Fermi}) {
    const BogoliubovMap id = identity(2, s);
    CHECK(id.p == CMatrix::Identity(2, 2));
    CHECK(id.q.isZero(0.0));
    CHECK(id.xi.isZero(0.0));
    CHECK(id.parity == Parity::Even);
    CHECK(id.group_residual() == 0.0);
    const BogoliubovMap m = random_map(2, s, 0.5, 0.5, rng);
    CHECK(map_distance(compose(id, m), m) < 1e-14);
    CHECK(map_distance(compose(m, id), m) < 1e-14);
    CHECK(map_distance(inverse(id), id) == 0.0);
  }
}

TEST_CASE("from_generator pins the squeeze convention") {
  for (double t : {0.1, 0.4, 1.3}) {
    const BogoliubovMap m = from_generator(bose_squeeze(t));
    CHECK(std::abs(m.p(0, 0) - std::cosh(t)) < 1e-12);
    CHECK(std::abs(m.q(0, 0) - std::sinh(t)) < 1e-12);
    CHECK(m.xi.isZero(0.0));
  }
  CHECK(map_distance(from_generator(Generator::zero(2, Statistics::Bose)), identity(2, Statistics::Bose)) < 1e-15);
}

TEST_CASE("from_generator for a fermionic pair rotates p into q") {
  const double t = 0.3;
  Generator g = Generator::zero(2, Statistics::Fermi);
  g.theta(0, 1) = t;
  g.theta(1, 0) = -t;
  const BogoliubovMap m = from_generator(g);
  CHECK(max_abs(m.p - std::cos(t) * CMatrix::Identity(2, 2)) < 1e-12);
  CHECK(std::abs(std::abs(m.q(0, 1)) - std::sin(t)) < 1e-12);
  CHECK(std::abs(m.q(0, 1) + m.q(1, 0)) < 1e-12);
  CHECK(std::abs(m.q(0, 0)) < 1e-15);
}

TEST_CASE("from_generator agrees with Fock-space conjugation") {
  std::mt19937_64 rng(32);
  SUBCASE("fermions, exact") {
    for (int trial = 0; trial < 5; ++trial) {
      const Generator g = random_generator(3, Statistics::Fermi, 0.9, 0.0, rng);
      const FockBasis basis(Statistics::Fermi, 3);
      CHECK(conjugation_error(from_generator(g), dense_unitary(g, basis), basis, basis.dimension()) < 1e-10);
    }
  }
  SUBCASE("bosons on low-lying columns") {
    for (int trial = 0; trial < 5; ++trial) {
      const Generator g = random_generator(1, Statistics::Bose, 0.3, 0.3, rng);
      const FockBasis basis(Statistics::Bose, 1, 60);
      CHECK(conjugation_error(from_generator(g), dense_unitary(g, basis), basis, 4) < 1e-8);
    }
  }
}

TEST_CASE("reflection acts as the unitary y·a* + ȳ·a") {
  std::mt19937_64 rng(33);
  const int n = 3;
  const FockBasis basis(Statistics::Fermi, n);
  const auto lad = build_ladders(basis);
  CVector y(n);
  for (int i = 0; i < n; ++i) y(i) = qfree::testing::random_complex(rng);
  y.normalize();
  CMatrix r = CMatrix::Zero(basis.dimension(), basis.dimension());
  for (int i = 0; i < n; ++i) r += y(i) * lad[i].second + std::conj(y(i)) * lad[i].first;
  CHECK(max_abs(r * r.adjoint() - CMatrix::Identity(basis.dimension(), basis.dimension())) < 1e-12);
  const BogoliubovMap m = reflection(y);
  CHECK(m.parity == Parity::Odd);
  CHECK(conjugation_error(m, r, basis, basis.dimension()) < 1e-12);
}

TEST_CASE("compose is the map of the operator product") {
  std::mt19937_64 rng(34);
  const FockBasis basis(Statistics::Fermi, 3);
  for (int trial = 0; trial < 5; ++trial) {
    const Generator g1 = random_generator(3, Statistics::Fermi, 0.8, 0.0, rng);
    const Generator g2 = random_generator(3, Statistics::Fermi, 0.8, 0.0, rng);
    const CMatrix u = dense_unitary(g1, basis) * dense_unitary(g2, basis);
    CHECK(conjugation_error(compose(from_generator(g1), from_generator(g2)), u, basis, basis.dimension()) < 1e-10);
  }
}

TEST_CASE("two squeezes compose to one") {
  const BogoliubovMap m = compose(from_generator(bose_squeeze(0.3)), from_generator(bose_squeeze(0.45)));
  CHECK(map_distance(m, from_generator(bose_squeeze(0.75))) < 1e-12);
}

TEST_CASE("inverse laws") {
  std::mt19937_64 rng(35);
  CHECK(map_distance(inverse(from_generator(bose_squeeze(0.6))), from_generator(bose_squeeze(-0.6))) < 1e-12);
  for (Statistics s : {Statistics::Bose, Statistics::Fermi}) {
    for (int trial = 0; trial < 10; ++trial) {
      const BogoliubovMap m = random_map(3, s, 0.7, 0.8, rng, s == Statistics::Fermi && trial % 2 == 1);
      CHECK(map_distance(compose(m, inverse(m)), identity(3, s)) < 1e-10);
      CHECK(map_distance(compose(inverse(m), m), identity(3, s)) < 1e-10);
      CHECK(inverse(m).parity == m.parity);
    }
  }
  Generator d = Generator::zero(2, Statistics::Bose);
  d.y << Complex(0.4, -0.2), Complex(-0.1, 0.3);
  const BogoliubovMap disp = from_generator(d);
  CHECK(max_abs(disp.xi + kI * d.y) < 1e-14);
  CHECK(map_distance(compose(disp, inverse(disp)), identity(2, Statistics::Bose)) < 1e-14);
}

TEST_CASE("form preservation and group residuals hold after every operation") {
  std::mt19937_64 rng(36);
  for (Statistics s : {Statistics::Bose, Statistics::Fermi}) {
    for (int trial = 0; trial < 10; ++trial) {
      const BogoliubovMap a = random_map(3, s, 0.8, 0.5, rng, s == Statistics::Fermi && trial % 3 == 0);
      const BogoliubovMap b = random_map(3, s, 0.8, 0.5, rng);
      for (const BogoliubovMap& m : {a, b, compose(a, b), inverse(a)}) {
        CHECK(m.group_residual() < 1e-10);
        CHECK(sampled_form_defect(m, rng) < 1e-10);
      }
    }
  }
}

TEST_CASE("fermionic parity is a homomorphism") {
  std::mt19937_64 rng(37);
  const BogoliubovMap odd = random_map(2, Statistics::Fermi, 0.5, 0.0, rng, true);
  const BogoliubovMap even = random_map(2, Statistics::Fermi, 0.5, 0.0, rng, false);
  CHECK(compose(odd, odd).parity == Parity::Even);
  CHECK(compose(odd, even).parity == Parity::Odd);
  CHECK(compose(even, odd).parity == Parity::Odd);
  CHECK(compose(even, even).parity == Parity::Even);
  // the state parity matches the flag
  const FockBasis basis(Statistics::Fermi, 2);
  for (const BogoliubovMap& m : {odd, even}) {
    const FockVector v = map_vector(m, basis);
    double wrong = 0.0;
    for (long k = 0; k < basis.dimension(); ++k) {
      const auto occ = basis.occupations(k);
      const bool odd_state = (occ[0] + occ[1]) % 2 == 1;
      if (odd_state != (m.parity == Parity::Odd)) wrong += std::norm(v.amplitudes(k));
    }
    CHECK(wrong < 1e-20);
  }
}

TEST_CASE("c_from_theta reproduces the scalar tanh and tan formulas") {
  const double s = 0.8;
  const ThoulessChart bose = c_from_theta(bose_squeeze(s / 2));
  // c = i·tanh(|θ|)·θ/|θ| with θ = i s/2
  CHECK(std::abs(bose.c(0, 0) - kI * std::tanh(s / 2) * kI) < 1e-14);

  const double t = 0.7;
  Generator g = Generator::zero(2, Statistics::Fermi);
  g.theta(0, 1) = t;
  g.theta(1, 0) = -t;
  const ThoulessChart fermi = c_from_theta(g);
  CHECK(std::abs(fermi.c(0, 1) - kI * std::tan(t)) < 1e-13);
  CHECK(std::abs(fermi.c(1, 0) + kI * std::tan(t)) < 1e-13);

  CHECK(c_from_theta(Generator::zero(2, Statistics::Bose)).c.isZero(0.0));
}

TEST_CASE("c_from_theta rejects fermionic generators outside the chart") {
  Generator g = Generator::zero(2, Statistics::Fermi);
  g.theta(0, 1) = 1.6;
  g.theta(1, 0) = -1.6;
  CHECK_THROWS_AS(c_from_theta(g), ChartDomainError);
}

TEST_CASE("chart_from_map matches c_from_theta") {
  std::mt19937_64 rng(38);
  CHECK(chart_from_map(identity(2, Statistics::Bose)).c.isZero(0.0));
  CHECK(chart_from_map(identity(2, Statistics::Bose)).y.isZero(0.0));
  for (Statistics s : {Statistics::Bose, Statistics::Fermi}) {
    for (int trial = 0; trial < 10; ++trial) {
      const Generator g = random_generator(3, s, 0.6, 0.4, rng);
      const ThoulessChart a = c_from_theta(g);
      const ThoulessChart b = chart_from_map(from_generator(g));
      CHECK(max_abs(a.c - b.c) < 1e-10);
      CHECK(max_abs(a.y - b.y) < 1e-10);
    }
  }
}

TEST_CASE("chart_from_map reports degenerate fermionic states") {
  BogoliubovMap swap = identity(1, Statistics::Fermi);
  swap.p(0, 0) = 0.0;
  swap.q(0, 0) = 1.0;
  swap.parity = Parity::Odd;
  CHECK_THROWS_AS(chart_from_map(swap), DegeneracyError);
}

TEST_CASE("chart vectors agree with generator exponentials up to phase") {
  std::mt19937_64 rng(39);
  SUBCASE("one boson, small squeeze and displacement") {
    for (int trial = 0; trial < 5; ++trial) {
      const Generator g = random_generator(1, Statistics::Bose, 0.3, 0.3, rng);
      const FockBasis basis(Statistics::Bose, 1, 40);
      const FockVector a = gaussian_vector(c_from_theta(g), basis);
      const FockVector b = exp_generator(g, basis, vacuum(basis));
      CHECK(overlap(a, b) > 1 - 1e-8);
    }
  }
  SUBCASE("three fermions") {
    for (int trial = 0; trial < 5; ++trial) {
      const Generator g = random_generator(3, Statistics::Fermi, 1.2, 0.0, rng);
      const FockBasis basis(Statistics::Fermi, 3);
      const FockVector a = gaussian_vector(c_from_theta(g), basis);
      const FockVector b = exp_generator(g, basis, vacuum(basis));
      CHECK(overlap(a, b) > 1 - 1e-12);
    }
  }
}

TEST_CASE("gauge covariance of the state and the blocks") {
  std::mt19937_64 rng(40);
  for (Statistics s : {Statistics::Bose, Statistics::Fermi}) {
    const int n = 2;
    const WickPolynomial h = qfree::testing::random_hermitian(n, s, 4, 20, rng, true);
    const BogoliubovMap m = random_map(n, s, 0.3, 0.0, rng);
    const BogoliubovMap gauged = compose(m, number_conserving(s, random_unitary(n, rng)));
    const TransformedBlocks b1 = residuals(h, m), b2 = residuals(h, gauged);
    CHECK(std::abs(b1.B - b2.B) < 1e-10);
    CHECK(std::abs(b1.norm_K() - b2.norm_K()) < 1e-10);
    CHECK(std::abs(b1.norm_O() - b2.norm_O()) < 1e-10);
    CHECK(max_abs(b1.D_spectrum() - b2.D_spectrum()) < 1e-10);
    const FockBasis basis(s, n, 30);
    CHECK(overlap(map_vector(m, basis), map_vector(gauged, basis)) > 1 - 1e-10);
  }
}

TEST_CASE("random_unitary is unitary") {
  std::mt19937_64 rng(41);
  const CMatrix u = random_unitary(4, rng);
  CHECK(max_abs(u * u.adjoint() - CMatrix::Identity(4, 4)) < 1e-13);
}

TEST_CASE("invalid generators are rejected") {
  Generator g = Generator::zero(2, Statistics::Bose);
  g.theta(0, 1) = 1.0;
  CHECK_THROWS_AS(from_generator(g), Error);
  Generator f = Generator::zero(2, Statistics::Fermi);
  f.y(0) = 1.0;
  CHECK_THROWS_AS(from_generator(f), Error);
  CHECK_THROWS_AS(compose(identity(2, Statistics::Bose), identity(3, Statistics::Bose)), MismatchError);
}
