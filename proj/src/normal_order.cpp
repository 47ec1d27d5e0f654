#include "qfree/normal_order.h"

#include <map>
#include <utility>

namespace qfree {

namespace {

// Ordering rank inside a Wick monomial: creators (by mode) before
// annihilators (by mode).
bool misordered(const Ladder& left, const Ladder& right) {
  if (left.dagger != right.dagger) return !left.dagger;
  return left.mode > right.mode;
}

struct Pending {
  std::vector<Ladder> word;
  int sign;
  Complex coeff;
};

void check_same_space(const WickPolynomial& poly, const LinearOperator& op) {
  if (op.u.size() != poly.n_modes() || op.v.size() != poly.n_modes()) {
    throw MismatchError("linear operator and polynomial differ in mode count");
  }
}

std::vector<Ladder> word_of(const TermKey& key) {
  std::vector<Ladder> word;
  word.reserve(key.creation.size() + key.annihilation.size() + 1);
  for (int i : key.creation) word.push_back({i, true});
  for (int i : key.annihilation) word.push_back({i, false});
  return word;
}

void accumulate_word(WickPolynomial& out, std::vector<Ladder> word, Complex coeff) {
  WickPolynomial part = normal_order_word(out.stats(), out.n_modes(), word, coeff);
  out += part;
}

}  // namespace

LinearOperator LinearOperator::creation(int n, int i) {
  LinearOperator op{CVector::Zero(n), CVector::Zero(n), {}};
  op.u(i) = 1.0;
  return op;
}

LinearOperator LinearOperator::annihilation(int n, int i) {
  LinearOperator op{CVector::Zero(n), CVector::Zero(n), {}};
  op.v(i) = 1.0;
  return op;
}

WickPolynomial normal_order_word(Statistics stats, int n_modes, std::span<const Ladder> word, Complex coeff) {
  WickPolynomial out(n_modes, stats);
  for (const Ladder& l : word) {
    if (l.mode < 0 || l.mode >= n_modes) throw RangeError("ladder operator mode out of range");
  }
  const int exch = exchange_sign(stats);
  const bool fermi = stats == Statistics::Fermi;

  std::vector<Pending> stack;
  stack.push_back({std::vector<Ladder>(word.begin(), word.end()), 1, coeff});
  while (!stack.empty()) {
    Pending item = std::move(stack.back());
    stack.pop_back();
    auto& w = item.word;
    bool vanished = false;
    std::size_t i = 0;
    while (i + 1 < w.size()) {
      const Ladder l = w[i];
      const Ladder r = w[i + 1];
      if (fermi && l.dagger == r.dagger && l.mode == r.mode) {
        vanished = true;
        break;
      }
      if (!misordered(l, r)) {
        ++i;
        continue;
      }
      if (!l.dagger && r.dagger && l.mode == r.mode) {
        // a_j a*_j = ± a*_j a_j + 1
        std::vector<Ladder> contracted;
        contracted.reserve(w.size() - 2);
        contracted.insert(contracted.end(), w.begin(), w.begin() + static_cast<std::ptrdiff_t>(i));
        contracted.insert(contracted.end(), w.begin() + static_cast<std::ptrdiff_t>(i + 2), w.end());
        stack.push_back({std::move(contracted), item.sign, item.coeff});
      }
      std::swap(w[i], w[i + 1]);
      item.sign *= exch;
      i = i == 0 ? 0 : i - 1;
    }
    if (vanished) continue;
    TermKey key;
    for (const Ladder& l : w) (l.dagger ? key.creation : key.annihilation).push_back(l.mode);
    out.add_canonical(key, static_cast<double>(item.sign) * item.coeff);
  }
  return out;
}

WickPolynomial multiply_linear(const WickPolynomial& poly, const LinearOperator& op, Side side) {
  check_same_space(poly, op);
  WickPolynomial out(poly.n_modes(), poly.stats());
  const int n = poly.n_modes();
  for (const auto& [key, c] : poly.terms()) {
    if (op.w != Complex{}) out.add_canonical(key, c * op.w);
    const std::vector<Ladder> base = word_of(key);
    for (int i = 0; i < n; ++i) {
      for (const auto& [amp, dagger] : {std::pair{op.u(i), true}, std::pair{op.v(i), false}}) {
        if (amp == Complex{}) continue;
        std::vector<Ladder> word;
        word.reserve(base.size() + 1);
        if (side == Side::Left) word.push_back({i, dagger});
        word.insert(word.end(), base.begin(), base.end());
        if (side == Side::Right) word.push_back({i, dagger});
        accumulate_word(out, std::move(word), c * amp);
      }
    }
  }
  return out;
}

WickPolynomial multiply(const WickPolynomial& lhs, const WickPolynomial& rhs) {
  if (lhs.n_modes() != rhs.n_modes() || lhs.stats() != rhs.stats()) {
    throw MismatchError("polynomials differ in mode count or statistics");
  }
  WickPolynomial out(lhs.n_modes(), lhs.stats());
  for (const auto& [lk, lc] : lhs.terms()) {
    for (const auto& [rk, rc] : rhs.terms()) {
      std::vector<Ladder> word = word_of(lk);
      std::vector<Ladder> tail = word_of(rk);
      word.insert(word.end(), tail.begin(), tail.end());
      accumulate_word(out, std::move(word), lc * rc);
    }
  }
  return out;
}

WickPolynomial substitute_linear(const WickPolynomial& poly, std::span<const LinearOperator> creation_subst,
                                 std::span<const LinearOperator> annihilation_subst,
                                 const SubstituteOptions& options) {
  const int n = poly.n_modes();
  if (static_cast<int>(creation_subst.size()) != n || static_cast<int>(annihilation_subst.size()) != n) {
    throw MismatchError("substitution arrays must have one entry per mode");
  }
  for (const auto* subst : {&creation_subst, &annihilation_subst}) {
    for (const LinearOperator& op : *subst) check_same_space(poly, op);
  }

  WickPolynomial unit(n, poly.stats());
  unit.add({}, {}, 1.0);

  // Products of substituted factors, keyed by (factor codes, factors still to
  // come). Terms that cannot contract below max_degree are dropped early.
  std::map<std::pair<std::vector<int>, int>, WickPolynomial> memo;

  WickPolynomial out(n, poly.stats());
  for (const auto& [key, h] : poly.terms()) {
    const std::vector<Ladder> word = word_of(key);
    const int total = static_cast<int>(word.size());
    std::vector<int> codes;
    const WickPolynomial* acc = &unit;
    for (int k = 0; k < total; ++k) {
      const Ladder& l = word[k];
      codes.push_back(2 * l.mode + (l.dagger ? 1 : 0));
      const int remaining = total - k - 1;
      auto memo_key = std::make_pair(codes, remaining);
      auto it = memo.find(memo_key);
      if (it == memo.end()) {
        const LinearOperator& op = l.dagger ? creation_subst[l.mode] : annihilation_subst[l.mode];
        WickPolynomial next = multiply_linear(*acc, op, Side::Right);
        if (options.max_degree < kMaxDegree) {
          WickPolynomial kept(n, poly.stats());
          for (const auto& [tk, tc] : next.terms()) {
            if (tk.degree() - remaining <= options.max_degree) kept.add_canonical(tk, tc);
          }
          next = std::move(kept);
        }
        it = memo.emplace(std::move(memo_key), std::move(next)).first;
      }
      acc = &it->second;
    }
    for (const auto& [tk, tc] : acc->terms()) {
      if (tk.degree() <= options.max_degree) out.add_canonical(tk, h * tc);
    }
  }
  return out;
}

Complex vacuum_expectation(const WickPolynomial& poly) { return poly.coefficient(TermKey{}); }

}  // namespace qfree
