#include "qfree/variational.h"

#include <cmath>
#include <limits>

#include "qfree/normal_order.h"

namespace qfree {

namespace {

constexpr Complex kI(0.0, 1.0);

double sigma(Statistics stats) { return stats == Statistics::Bose ? 1.0 : -1.0; }

double energy_noise(double energy) { return 1e-12 * std::max(1.0, std::abs(energy)); }

bool is_fermi(Mode mode) { return mode == Mode::FermiEven || mode == Mode::FermiOdd; }

CMatrix random_pair_matrix(int n, Statistics stats, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  CMatrix t(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) t(i, j) = Complex(gauss(rng), gauss(rng));
  }
  return 0.5 * (t + sigma(stats) * t.transpose());
}

CVector random_complex_vector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = Complex(gauss(rng), gauss(rng));
  return v;
}

std::vector<BogoliubovMap> starting_points(int n, Mode mode, const MinimizeOptions& opts) {
  const Statistics stats = statistics_of(mode);
  std::vector<BogoliubovMap> base;
  if (mode == Mode::FermiOdd) {
    if (opts.odd_reflection) {
      base.push_back(reflection(*opts.odd_reflection));
    } else {
      for (int k = 0; k < n; ++k) base.push_back(reflection(CVector::Unit(n, k)));
    }
  } else {
    base.push_back(identity(n, stats));
  }

  std::vector<BogoliubovMap> starts = base;
  // A single fermionic mode has no antisymmetric pair directions.
  if (is_fermi(mode) && n < 2) return starts;
  std::mt19937_64 rng(opts.seed);
  for (int r = 0; r < opts.random_starts; ++r) {
    Generator g = Generator::zero(n, stats);
    g.theta = random_pair_matrix(n, stats, rng);
    if (mode == Mode::BoseFull) g.y = random_complex_vector(n, rng);
    const double norm = g.norm();
    if (norm > 0.0) g = g.scaled(opts.start_scale / norm);
    starts.push_back(compose(base.front(), from_generator(g)));
  }
  return starts;
}

// Lower rank is better.
int status_rank(Status s) {
  switch (s) {
    case Status::UnboundedBelow:
      return 0;
    case Status::Converged:
      return 1;
    case Status::MaxIterations:
      return 2;
  }
  return 3;
}

// Dense Fock-space energy for states near a reference map.
class EnergyOracle {
 public:
  EnergyOracle(const WickPolynomial& H, const BogoliubovMap& reference, const CertifyOptions& opts)
      : H_(H), tail_tol_(opts.tail_tol) {
    int cutoff = opts.cutoff;
    for (;;) {
      FockBasis basis(H.stats(), H.n_modes(), cutoff, opts.max_dimension);
      try {
        map_vector(reference, basis, tail_tol_ * 1e-2);
        basis_.emplace(std::move(basis));
        break;
      } catch (const TruncationError&) {
        if (H.stats() == Statistics::Fermi) throw;
        cutoff += 2;
      }
    }
    cutoff_ = cutoff;
    matrix_ = quantize(H_, *basis_);
  }

  double energy(const BogoliubovMap& U) const {
    return expectation(map_vector(U, *basis_, tail_tol_), matrix_).real();
  }

  int cutoff() const { return cutoff_; }

 private:
  const WickPolynomial& H_;
  double tail_tol_;
  std::optional<FockBasis> basis_;
  CMatrix matrix_;
  int cutoff_ = 0;
};

BogoliubovMap perturbed(const BogoliubovMap& U, const Generator& g, double s) {
  return compose(U, from_generator(g.scaled(s)));
}

}  // namespace

const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::BoseEven:
      return "bose-even";
    case Mode::BoseFull:
      return "bose-full";
    case Mode::FermiEven:
      return "fermi-even";
    case Mode::FermiOdd:
      return "fermi-odd";
  }
  return "?";
}

Mode parse_mode(const std::string& text) {
  for (Mode m : {Mode::BoseEven, Mode::BoseFull, Mode::FermiEven, Mode::FermiOdd}) {
    if (text == to_string(m)) return m;
  }
  throw Error("unknown mode '" + text + "'");
}

Statistics statistics_of(Mode mode) { return is_fermi(mode) ? Statistics::Fermi : Statistics::Bose; }

const char* to_string(Status status) {
  switch (status) {
    case Status::Converged:
      return "converged";
    case Status::MaxIterations:
      return "max_iterations";
    case Status::UnboundedBelow:
      return "unbounded_below";
  }
  return "?";
}

TransformedBlocks residuals(const WickPolynomial& H, const BogoliubovMap& U, int max_degree) {
  if (H.stats() != U.stats || H.n_modes() != U.n_modes()) {
    throw MismatchError("Hamiltonian and Bogoliubov map differ in statistics or mode count");
  }
  // a_i = p'_ij b_j + q'_ij b*_j + ξ'_i with (p', q', ξ') the inverse map.
  const BogoliubovMap inv = inverse(U);
  const int n = H.n_modes();
  std::vector<LinearOperator> creation(n);
  std::vector<LinearOperator> annihilation(n);
  for (int i = 0; i < n; ++i) {
    annihilation[i] = {inv.q.row(i).transpose(), inv.p.row(i).transpose(), inv.xi(i)};
    creation[i] = {inv.p.row(i).transpose().conjugate(), inv.q.row(i).transpose().conjugate(),
                   std::conj(inv.xi(i))};
  }
  SubstituteOptions sub;
  sub.max_degree = std::max(max_degree, 2);
  return extract_blocks(substitute_linear(H, creation, annihilation, sub));
}

Generator descent_direction(const TransformedBlocks& blocks, Mode mode) {
  const int n = static_cast<int>(blocks.K.size());
  Generator g = Generator::zero(n, blocks.stats);
  g.theta = kI * sigma(blocks.stats) * blocks.O;
  if (mode == Mode::BoseFull) g.y = kI * blocks.K;
  return g;
}

double directional_derivative(const TransformedBlocks& blocks, const Generator& g) {
  const Complex theta_o = (g.theta.conjugate().array() * blocks.O.array()).sum();
  const Complex y_k = g.y.dot(blocks.K);
  return 2.0 * sigma(blocks.stats) * theta_o.imag() + 2.0 * y_k.imag();
}

void check_admissible(const WickPolynomial& H, Mode mode) {
  if (H.stats() != statistics_of(mode)) {
    throw MismatchError(std::string("mode ") + to_string(mode) + " does not match the Hamiltonian statistics");
  }
  if (!is_hermitian(H, 1e-12)) throw Error("Hamiltonian is not Hermitian");
  if (mode != Mode::BoseFull && parity(H) != Parity::Even) {
    throw Error(std::string("mode ") + to_string(mode) + " requires an even Hamiltonian");
  }
}

MinimizationResult minimize_from(const WickPolynomial& H, Mode mode, const BogoliubovMap& U0,
                                 const MinimizeOptions& opts) {
  check_admissible(H, mode);
  MinimizationResult res;
  res.U = U0;
  TransformedBlocks blocks = residuals(H, res.U, 2);
  double energy = blocks.B.real();
  res.energy_trace.push_back(energy);
  res.status = Status::MaxIterations;

  for (int it = 0;; ++it) {
    res.iterations = it;
    if (blocks.residual() < opts.tol_grad) {
      res.status = Status::Converged;
      break;
    }
    if (it >= opts.max_iterations) break;

    const Generator dir = descent_direction(blocks, mode);
    const double slope = 2.0 * (blocks.O.squaredNorm() + (mode == Mode::BoseFull ? blocks.K.squaredNorm() : 0.0));
    if (slope == 0.0) break;  // residual in a direction this mode cannot move

    bool accepted = false;
    const double start = std::min(opts.initial_step, opts.max_step_norm / dir.norm());
    for (double s = start; s > 1e-16 * start; s *= opts.shrink) {
      BogoliubovMap trial = perturbed(res.U, dir, s);
      TransformedBlocks tb = residuals(H, trial, 2);
      const double e = tb.B.real();
      if (!std::isfinite(e) || !trial.p.allFinite() || !trial.q.allFinite()) continue;
      const double decrease = opts.armijo * s * slope;
      const bool sufficient = e <= energy - decrease;
      // Below the rounding floor of B the Armijo test cannot resolve the
      // decrease; accept steps that reduce the gradient without raising B.
      const bool noise_level = decrease < energy_noise(energy) && e <= energy + energy_noise(energy) &&
                               tb.residual() < blocks.residual();
      if (!sufficient && !noise_level) continue;
      res.U = std::move(trial);
      blocks = std::move(tb);
      energy = e;
      res.energy_trace.push_back(energy);
      accepted = true;
      break;
    }
    if (!accepted) break;
    if (energy < opts.energy_floor || res.U.q.norm() > opts.q_norm_cap) {
      res.status = Status::UnboundedBelow;
      res.iterations = it + 1;
      break;
    }
  }

  if (res.status == Status::UnboundedBelow) {
    res.blocks = std::move(blocks);
  } else {
    res.blocks = residuals(H, res.U);
  }
  res.energy = res.blocks.B.real();
  res.residual = res.blocks.residual();
  res.D_spectrum = res.blocks.D_spectrum();
  res.starts_tried = 1;
  return res;
}

MinimizationResult minimize(const WickPolynomial& H, Mode mode, const MinimizeOptions& opts) {
  check_admissible(H, mode);
  const auto starts = starting_points(H.n_modes(), mode, opts);
  std::optional<MinimizationResult> best;
  for (const auto& start : starts) {
    MinimizationResult r = minimize_from(H, mode, start, opts);
    if (!best) {
      best = std::move(r);
      continue;
    }
    const int rb = status_rank(best->status);
    const int rr = status_rank(r.status);
    if (rr < rb || (rr == rb && r.energy < best->energy - 1e-12)) best = std::move(r);
  }
  best->starts_tried = static_cast<int>(starts.size());
  return std::move(*best);
}

Generator random_direction(int n, Mode mode, std::mt19937_64& rng) {
  const Statistics stats = statistics_of(mode);
  Generator g = Generator::zero(n, stats);
  if (!(is_fermi(mode) && n < 2)) g.theta = random_pair_matrix(n, stats, rng);
  if (mode == Mode::BoseFull) g.y = random_complex_vector(n, rng);
  const double norm = g.norm();
  return norm > 0.0 ? g.scaled(1.0 / norm) : g;
}

bool Certification::passed() const {
  auto ok = [](const CheckOutcome& c) { return c.passed || c.skipped; };
  return ok(fd_check) && ok(quadratic_check) && ok(gauge_check);
}

double oracle_energy(const WickPolynomial& H, const BogoliubovMap& U, int cutoff, long max_dimension,
                     double tail_tol, int* used_cutoff) {
  CertifyOptions o;
  o.cutoff = cutoff;
  o.max_dimension = max_dimension;
  o.tail_tol = tail_tol;
  EnergyOracle oracle(H, U, o);
  if (used_cutoff) *used_cutoff = oracle.cutoff();
  return oracle.energy(U);
}

Certification certify(const MinimizationResult& result, const WickPolynomial& H, Mode mode,
                      const CertifyOptions& opts) {
  if (result.status != Status::Converged) throw Error("certification requires a converged run");
  check_admissible(H, mode);
  Certification cert;
  const TransformedBlocks& blocks = result.blocks;
  cert.norm_K = blocks.norm_K();
  cert.norm_O = blocks.norm_O();
  const int n = H.n_modes();
  std::mt19937_64 rng(opts.seed);

  // (b) oracle directional derivatives against the analytic first-order value
  std::optional<EnergyOracle> oracle;
  try {
    oracle.emplace(H, result.U, opts);
  } catch (const Error& e) {
    cert.fd_check = {false, true, 0.0, std::string("oracle unavailable: ") + e.what()};
    cert.quadratic_check = cert.fd_check;
  }
  if (oracle) {
    const double h = opts.fd_step;
    bool ok = true;
    double worst = 0.0;
    for (int d = 0; d < opts.fd_directions; ++d) {
      const Generator g = random_direction(n, mode, rng);
      if (g.norm() == 0.0) continue;
      auto e = [&](double s) { return oracle->energy(perturbed(result.U, g, s)); };
      const double fd = (-e(2 * h) + 8 * e(h) - 8 * e(-h) + e(-2 * h)) / (12 * h);
      const double analytic = directional_derivative(blocks, g);
      const double err = std::abs(fd - analytic);
      worst = std::max(worst, err);
      ok = ok && err <= std::max(1e-6, 1e-4 * std::abs(analytic));
    }
    cert.fd_check = {ok, false, worst, "max |finite difference - analytic| over random directions"};

    // (c) second order along displacements at a BoseFull minimum
    if (mode == Mode::BoseFull) {
      bool qok = true;
      double qworst = 0.0;
      const double e0 = oracle->energy(result.U);
      for (int d = 0; d < opts.quadratic_directions; ++d) {
        Generator g = Generator::zero(n, Statistics::Bose);
        g.y = random_complex_vector(n, rng).normalized();
        const double fit =
            (oracle->energy(perturbed(result.U, g, h)) + oracle->energy(perturbed(result.U, g, -h)) - 2 * e0) /
            (2 * h * h);
        const double expected = g.y.dot(blocks.D * g.y).real();
        const double rel = std::abs(fit - expected) / std::max(std::abs(expected), 1e-12);
        qworst = std::max(qworst, rel);
        qok = qok && std::abs(fit - expected) <= opts.quadratic_rel_tol * std::abs(expected) + 1e-6;
      }
      cert.quadratic_check = {qok, false, qworst, "relative error of the fitted quadratic coefficient vs ȳDy"};
    } else {
      cert.quadratic_check = {false, true, 0.0, "only defined for bose-full minima"};
    }
  }

  // (d) gauge sweep
  {
    const RVector spectrum = blocks.D_spectrum();
    double worst = 0.0;
    for (int k = 0; k < opts.gauge_samples; ++k) {
      const BogoliubovMap gauge = number_conserving(H.stats(), random_unitary(n, rng));
      const TransformedBlocks gb = residuals(H, compose(result.U, gauge), 2);
      worst = std::max(worst, std::abs(gb.B - blocks.B));
      worst = std::max(worst, std::abs(gb.norm_K() - blocks.norm_K()));
      worst = std::max(worst, std::abs(gb.norm_O() - blocks.norm_O()));
      worst = std::max(worst, (gb.D_spectrum() - spectrum).cwiseAbs().maxCoeff());
    }
    cert.gauge_check = {worst < opts.gauge_tol, false, worst, "max change of B, |K|, |O|, spectrum of D under gauge maps"};
  }
  return cert;
}

}  // namespace qfree
