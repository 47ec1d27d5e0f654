#include <doctest.h>

#include "qfree/bogoliubov.h"
#include "qfree/fock_oracle.h"
#include "qfree/normal_order.h"
#include "test_support.h"

using namespace qfree;
using qfree::testing::max_abs;
using qfree::testing::random_complex;
using qfree::testing::random_polynomial;

namespace {

using Ladders = std::vector<std::pair<CMatrix, CMatrix>>;

// Σ coeff · (a*)^α a^β as a product of dense ladder matrices.
CMatrix dense_of(const WickPolynomial& p, const Ladders& lad, long dim) {
  CMatrix out = CMatrix::Zero(dim, dim);
  for (const auto& [key, coeff] : p.terms()) {
    CMatrix m = CMatrix::Identity(dim, dim);
    for (int i : key.creation) m = m * lad[i].second;
    for (int i : key.annihilation) m = m * lad[i].first;
    out += coeff * m;
  }
  return out;
}

CMatrix dense_of(const LinearOperator& op, const Ladders& lad, long dim) {
  CMatrix out = op.w * CMatrix::Identity(dim, dim);
  for (int i = 0; i < op.n_modes(); ++i) out += op.u(i) * lad[i].second + op.v(i) * lad[i].first;
  return out;
}

// Columns whose occupations leave `margin` quanta of headroom in every mode.
std::vector<long> safe_columns(const FockBasis& basis, int margin) {
  std::vector<long> cols;
  for (long k = 0; k < basis.dimension(); ++k) {
    bool ok = true;
    for (int j = 0; j < basis.n_modes(); ++j) ok = ok && basis.occupations(k)[j] + margin <= basis.cutoffs()[j];
    if (ok) cols.push_back(k);
  }
  return cols;
}

double column_difference(const CMatrix& a, const CMatrix& b, const std::vector<long>& cols) {
  double worst = 0.0;
  for (long c : cols) worst = std::max(worst, (a.col(c) - b.col(c)).cwiseAbs().maxCoeff());
  return worst;
}

LinearOperator random_linear(int n, Statistics stats, std::mt19937_64& rng) {
  LinearOperator op{CVector(n), CVector(n), stats == Statistics::Bose ? random_complex(rng) : Complex{}};
  for (int i = 0; i < n; ++i) {
    op.u(i) = random_complex(rng);
    op.v(i) = random_complex(rng);
  }
  return op;
}

// a_i and a*_i in terms of b = m a m*, as residuals() builds them.
void substitution_of(const BogoliubovMap& m, std::vector<LinearOperator>& creation,
                     std::vector<LinearOperator>& annihilation) {
  const BogoliubovMap inv = inverse(m);
  const int n = m.n_modes();
  creation.resize(n);
  annihilation.resize(n);
  for (int i = 0; i < n; ++i) {
    annihilation[i] = {inv.q.row(i).transpose(), inv.p.row(i).transpose(), inv.xi(i)};
    creation[i] = {inv.p.row(i).transpose().conjugate(), inv.q.row(i).transpose().conjugate(), std::conj(inv.xi(i))};
  }
}

}  // namespace

TEST_CASE("normal_order_word on the basic contractions") {
  const Ladder a0{0, false}, ad0{0, true}, a1{1, false}, ad1{1, true};

  std::vector<Ladder> w = {a0, ad0};
  WickPolynomial bose = normal_order_word(Statistics::Bose, 1, w, 1.0);
  CHECK(bose.coefficient({{0}, {0}}) == Complex(1.0));
  CHECK(bose.coefficient({{}, {}}) == Complex(1.0));
  CHECK(bose.size() == 2);

  WickPolynomial fermi = normal_order_word(Statistics::Fermi, 1, w, 1.0);
  CHECK(fermi.coefficient({{0}, {0}}) == Complex(-1.0));
  CHECK(fermi.coefficient({{}, {}}) == Complex(1.0));

  std::vector<Ladder> w2 = {a0, ad1};
  WickPolynomial cross = normal_order_word(Statistics::Fermi, 2, w2, 1.0);
  CHECK(cross.size() == 1);
  CHECK(cross.coefficient({{1}, {0}}) == Complex(-1.0));

  std::vector<Ladder> w3 = {ad0, ad0};
  CHECK(normal_order_word(Statistics::Fermi, 1, w3, 1.0).empty());
}

TEST_CASE("a a a* a* for bosons") {
  const Ladder a{0, false}, ad{0, true};
  std::vector<Ladder> w = {a, a, ad, ad};
  const WickPolynomial p = normal_order_word(Statistics::Bose, 1, w, 1.0);
  // a²a*² = a*²a² + 4a*a + 2
  CHECK(p.coefficient({{0, 0}, {0, 0}}) == Complex(1.0));
  CHECK(p.coefficient({{0}, {0}}) == Complex(4.0));
  CHECK(p.coefficient({{}, {}}) == Complex(2.0));
}

TEST_CASE("normal_order_word agrees with dense ladder products") {
  std::mt19937_64 rng(21);
  for (Statistics s : {Statistics::Bose, Statistics::Fermi}) {
    const int n = 2;
    const FockBasis basis(s, n, 9);
    const Ladders lad = build_ladders(basis);
    const auto cols = safe_columns(basis, 6);
    std::uniform_int_distribution<int> mode(0, n - 1), flip(0, 1);
    for (int trial = 0; trial < 30; ++trial) {
      std::vector<Ladder> word(6);
      CMatrix dense = CMatrix::Identity(basis.dimension(), basis.dimension());
      for (auto& l : word) {
        l = {mode(rng), flip(rng) == 1};
        dense = dense * (l.dagger ? lad[l.mode].second : lad[l.mode].first);
      }
      const WickPolynomial p = normal_order_word(s, n, word, 1.0);
      CHECK(column_difference(quantize(p, basis), dense, cols) < 1e-10);
    }
  }
}

TEST_CASE("multiply_linear has dense-matrix semantics on both sides") {
  std::mt19937_64 rng(22);
  for (Statistics s : {Statistics::Bose, Statistics::Fermi}) {
    const int n = 2;
    const FockBasis basis(s, n, 10);
    const Ladders lad = build_ladders(basis);
    const long dim = basis.dimension();
    const auto cols = safe_columns(basis, 5);
    for (int trial = 0; trial < 10; ++trial) {
      const WickPolynomial p = random_polynomial(n, s, 4, 10, rng);
      const LinearOperator l = random_linear(n, s, rng);
      const CMatrix pd = dense_of(p, lad, dim);
      const CMatrix ld = dense_of(l, lad, dim);
      const double scale = std::max(1.0, max_abs(ld * pd));
      CHECK(column_difference(quantize(multiply_linear(p, l, Side::Left), basis), ld * pd, cols) < 1e-10 * scale);
      CHECK(column_difference(quantize(multiply_linear(p, l, Side::Right), basis), pd * ld, cols) < 1e-10 * scale);
    }
  }
}

TEST_CASE("multiply is associative and matches dense products for fermions") {
  std::mt19937_64 rng(23);
  const int n = 3;
  const FockBasis basis(Statistics::Fermi, n);
  const Ladders lad = build_ladders(basis);
  for (int trial = 0; trial < 10; ++trial) {
    const WickPolynomial a = random_polynomial(n, Statistics::Fermi, 3, 8, rng);
    const WickPolynomial b = random_polynomial(n, Statistics::Fermi, 3, 8, rng);
    const WickPolynomial c = random_polynomial(n, Statistics::Fermi, 2, 6, rng);
    const CMatrix ab = dense_of(a, lad, basis.dimension()) * dense_of(b, lad, basis.dimension());
    CHECK(max_abs(quantize(multiply(a, b), basis) - ab) < 1e-10 * std::max(1.0, max_abs(ab)));
    CHECK(multiply(multiply(a, b), c).max_abs_difference(multiply(a, multiply(b, c))) < 1e-10);
  }
}

TEST_CASE("bosonic commutator [a, a*] = 1 through multiply") {
  WickPolynomial a(2, Statistics::Bose), ad(2, Statistics::Bose);
  a.add({}, {1}, 1.0);
  ad.add({1}, {}, 1.0);
  const WickPolynomial comm = multiply(a, ad) - multiply(ad, a);
  CHECK(comm.size() == 1);
  CHECK(comm.coefficient({{}, {}}) == Complex(1.0));
}

TEST_CASE("substitute_linear matches dense evaluation for fermions") {
  std::mt19937_64 rng(24);
  const int n = 3;
  const FockBasis basis(Statistics::Fermi, n);
  const Ladders lad = build_ladders(basis);
  const long dim = basis.dimension();
  for (int trial = 0; trial < 5; ++trial) {
    const WickPolynomial p = random_polynomial(n, Statistics::Fermi, 4, 12, rng);
    std::vector<LinearOperator> cr(n), an(n);
    Ladders subst(n);
    for (int i = 0; i < n; ++i) {
      cr[i] = random_linear(n, Statistics::Fermi, rng);
      an[i] = random_linear(n, Statistics::Fermi, rng);
      subst[i] = {dense_of(an[i], lad, dim), dense_of(cr[i], lad, dim)};
    }
    const CMatrix expected = dense_of(p, subst, dim);
    CHECK(max_abs(quantize(substitute_linear(p, cr, an), basis) - expected) < 1e-9 * std::max(1.0, max_abs(expected)));
  }
}

TEST_CASE("substitution by a map followed by its inverse is the identity") {
  std::mt19937_64 rng(25);
  for (Statistics s : {Statistics::Bose, Statistics::Fermi}) {
    for (int trial = 0; trial < 5; ++trial) {
      const int n = 2;
      const WickPolynomial p = random_polynomial(n, s, 4, 15, rng);
      const BogoliubovMap m = qfree::testing::random_map(n, s, 0.4, 0.3, rng, s == Statistics::Fermi && trial % 2);
      std::vector<LinearOperator> cr, an, cr2, an2;
      substitution_of(m, cr, an);
      substitution_of(inverse(m), cr2, an2);
      const WickPolynomial back = substitute_linear(substitute_linear(p, cr, an), cr2, an2);
      CHECK(back.max_abs_difference(p) < 1e-10);
    }
  }
}

TEST_CASE("max_degree pruning keeps the low-degree part exact") {
  std::mt19937_64 rng(26);
  for (Statistics s : {Statistics::Bose, Statistics::Fermi}) {
    const int n = 3;
    const WickPolynomial p = random_polynomial(n, s, 6, 25, rng);
    const BogoliubovMap m = qfree::testing::random_map(n, s, 0.5, 0.5, rng);
    std::vector<LinearOperator> cr, an;
    substitution_of(m, cr, an);
    const WickPolynomial full = substitute_linear(p, cr, an);
    const WickPolynomial cut = substitute_linear(p, cr, an, {2});
    CHECK(cut.degree() <= 2);
    WickPolynomial low(n, s);
    for (int d = 0; d <= 2; ++d) low += full.degree_part(d);
    CHECK(cut.max_abs_difference(low) < 1e-12 * std::max(1.0, std::abs(full.coefficient({}))));
  }
}

TEST_CASE("substitution of a degree-eight polynomial terminates within the cap") {
  std::mt19937_64 rng(27);
  const int n = 2;
  WickPolynomial p(n, Statistics::Bose);
  p.add({0, 0, 1, 1}, {0, 1, 1, 1}, 0.2).add({0, 1, 1, 1}, {0, 0, 1, 1}, 0.2).add({0, 0, 0, 0}, {1, 1, 1, 1}, 0.1);
  const BogoliubovMap m = qfree::testing::random_map(n, Statistics::Bose, 0.3, 0.3, rng);
  std::vector<LinearOperator> cr, an;
  substitution_of(m, cr, an);
  const WickPolynomial out = substitute_linear(p, cr, an);
  CHECK(out.degree() == 8);
  CHECK(std::isfinite(std::abs(vacuum_expectation(out))));
}

TEST_CASE("vacuum_expectation is the constant term") {
  WickPolynomial p(1, Statistics::Bose);
  p.add({}, {}, 0.7).add({0}, {0}, 3.0);
  CHECK(vacuum_expectation(p) == Complex(0.7));
  CHECK(vacuum_expectation(WickPolynomial(1, Statistics::Bose)) == Complex(0.0));
}
