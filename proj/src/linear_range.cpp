#include <algorithm>
#include <cmath>
#include <limits>

#include "qrlab/error.hpp"
#include "qrlab/qr_number.hpp"
#include "qrlab/random.hpp"

namespace qrlab {

namespace {

using Vec = Eigen::Vector3d;

// Keep constructed extremizers strictly inside the ball under the
// membership test (d + margin < r).
constexpr double kInsetMargin = 4.0 * kBoundaryMargin;
constexpr double kInsetFactor = 1.0 - 1e-9;
constexpr Eigen::Index kRefineMaxDim = 16;

Vec bloch_of(const DensityState& rho) {
  const auto& m = rho.matrix();
  return {2.0 * m(0, 1).real(), -2.0 * m(0, 1).imag(), (m(0, 0) - m(1, 1)).real()};
}

// A = a0 I + a . sigma
Vec bloch_coefficients(const HermitianOperator& a) {
  const auto& m = a.matrix();
  return {m(0, 1).real(), -m(0, 1).imag(), 0.5 * (m(0, 0) - m(1, 1)).real()};
}

DensityState state_of(const Vec& x) {
  ComplexMatrix m(2, 2);
  m(0, 0) = 0.5 * (1.0 + x(2));
  m(1, 1) = 0.5 * (1.0 - x(2));
  m(0, 1) = Complex(0.5 * x(0), -0.5 * x(1));
  m(1, 0) = std::conj(m(0, 1));
  return project_to_states(m);
}

Vec any_perpendicular(const Vec& v) {
  const Vec trial = std::abs(v(0)) < 0.9 ? Vec(1, 0, 0) : Vec(0, 1, 0);
  return (trial - trial.dot(v) * v).normalized();
}

// argmax of dir . x over the unit ball intersected with the closed ball |x - c| <= r
// (Euclidean Bloch distance equals trace distance). dir is a unit vector.
Vec bloch_argmax(const Vec& c, double r, const Vec& dir) {
  const Vec free = c + r * dir;
  if (free.norm() <= 1.0) return free;
  if ((dir - c).norm() <= r) return dir;
  // Optimum on the circle where the two spheres meet.
  const double cn = c.norm();
  const Vec ch = c / cn;
  const double h = (1.0 + cn * cn - r * r) / (2.0 * cn);
  const double rho = std::sqrt(std::max(0.0, 1.0 - h * h));
  const Vec perp = dir - dir.dot(ch) * ch;
  const Vec u = perp.norm() > 1e-15 ? Vec(perp.normalized()) : any_perpendicular(ch);
  return h * ch + rho * u;
}

// Pull x toward the ball center so it passes the strict membership test.
Vec inset(const Vec& c, double r, const Vec& x) {
  const double d = (x - c).norm();
  if (d == 0.0) return x;
  const double f = std::min(kInsetFactor, (r - kInsetMargin) / d);
  return c + std::max(0.0, f) * (x - c);
}

DensityState inset(const Ball& ball, const DensityState& rho) {
  const double d = trace_distance(ball.center(), rho);
  if (d + kInsetMargin < ball.radius()) return rho;
  const double f = std::max(0.0, std::min(kInsetFactor, (ball.radius() - kInsetMargin) / d));
  return DensityState::mix(ball.center(), rho, f);
}

LinearExtrema qubit_extrema(const HermitianOperator& a, const Ball& ball) {
  const Vec coeff = bloch_coefficients(a);
  const double a0 = 0.5 * a.matrix().trace().real();
  const Vec c = bloch_of(ball.center());
  const double r = ball.radius();
  const double norm = coeff.norm();
  if (norm == 0.0) return {a0, a0, ball.center(), ball.center(), true};
  const Vec dir = coeff / norm;
  const Vec xmax = bloch_argmax(c, r, dir);
  const Vec xmin = bloch_argmax(c, r, -dir);
  return {a0 + coeff.dot(xmin), a0 + coeff.dot(xmax), state_of(inset(c, r, xmin)), state_of(inset(c, r, xmax)),
          true};
}

struct Scored {
  DensityState state;
  double value;
};

// Best feasible state for maximizing Tr(rho B) over the ball.
Scored maximize_general(const HermitianOperator& b, const SpectralDecomposition& spec, const Ball& ball,
                        const SampleBudget& budget, std::uint64_t stream_index) {
  const auto& c = ball.center();
  const double r = ball.radius();
  const Eigen::Index dim = b.dim();
  const Eigen::Index top = dim - 1;
  const ComplexVector v_top = spec.eigenvectors.col(top);
  const ComplexVector v_bot = spec.eigenvectors.col(0);

  Scored best{c, c.expectation(b)};
  auto consider = [&](const DensityState& rho) {
    if (!contains(ball, rho)) return;
    const double v = rho.expectation(b);
    if (v > best.value) best = {rho, v};
  };

  // Segment toward the top eigenvector.
  const auto p_top = DensityState::pure(v_top);
  consider(inset(ball, p_top));

  // Move weight r/2 from the bottom to the top eigenvector.
  {
    const ComplexMatrix step = (0.5 * r * kInsetFactor) * (v_top * v_top.adjoint() - v_bot * v_bot.adjoint());
    consider(inset(ball, project_to_states(c.matrix() + step)));
  }

  // Nearly pure center: rotate the vector toward (B - <B>) psi.
  {
    const auto cs = eig_decompose(HermitianOperator(c.matrix()));
    if (cs.raw_eigenvalues(top) > 1.0 - 1e-9) {
      const ComplexVector psi = cs.eigenvectors.col(top);
      const Complex mean = psi.dot(b.matrix() * psi);
      const ComplexVector g = b.matrix() * psi - mean * psi;
      if (g.norm() > 1e-14) {
        const double s = std::min(1.0, 0.5 * r * kInsetFactor);
        const ComplexVector rotated = std::sqrt(1.0 - s * s) * psi + s * g.normalized();
        consider(inset(ball, DensityState::pure(rotated)));
      }
    }
  }

  if (dim > kRefineMaxDim) return best;

  // Local search from the best candidate: steps mix a move toward the top
  // eigenvector with a random traceless direction.
  double step = 0.25 * r;
  for (std::size_t k = 0; k < budget.refine_steps; ++k) {
    auto rng = substream(budget.seed, Stream::RangeRefinement, stream_index, k);
    ComplexMatrix h = random_hermitian(dim, rng);
    h -= (h.trace() / static_cast<double>(dim)) * ComplexMatrix::Identity(dim, dim);
    const double hn = trace_norm(h);
    ComplexMatrix g = p_top.matrix() - best.state.matrix();
    const double gn = trace_norm(g);
    ComplexMatrix dir = ComplexMatrix::Zero(dim, dim);
    if (hn > 0.0) dir += h / hn;
    if (gn > 0.0) dir += (uniform01(rng) * 2.0) * g / gn;
    const double dn = trace_norm(dir);
    if (dn == 0.0) continue;
    auto candidate = project_to_states(best.state.matrix() + (step / dn) * dir);
    candidate = inset(ball, candidate);
    const double before = best.value;
    consider(candidate);
    step = best.value > before ? std::min(r, 1.3 * step) : 0.7 * step;
  }
  return best;
}

}  // namespace

double linear_lipschitz(const HermitianOperator& a) {
  const Eigen::VectorXd ev = eigenvalues(a.matrix());
  return 0.5 * (ev(ev.size() - 1) - ev(0));
}

Interval linear_outer_bound(const HermitianOperator& a, const Ball& ball) {
  if (a.dim() != ball.dim()) throw ValidationError("linear_outer_bound: dimension mismatch");
  const Eigen::VectorXd ev = eigenvalues(a.matrix());
  const double lmin = ev(0);
  const double lmax = ev(ev.size() - 1);
  const double ac = ball.center().expectation(a);
  const double half = 0.5 * ball.radius() * (lmax - lmin);
  return {std::max(lmin, ac - half), std::min(lmax, ac + half)};
}

LinearExtrema linear_extrema(const HermitianOperator& a, const Ball& ball, const SampleBudget& budget) {
  if (a.dim() != ball.dim()) throw ValidationError("linear_extrema: dimension mismatch");
  if (a.dim() == 2) return qubit_extrema(a, ball);
  const auto spec = eig_decompose(a);
  const auto neg = a * -1.0;
  const auto neg_spec = eig_decompose(neg);
  const auto hi = maximize_general(a, spec, ball, budget, 0);
  const auto lo = maximize_general(neg, neg_spec, ball, budget, 1);
  return {-lo.value, hi.value, lo.state, hi.state, false};
}

LinearSummary summarize_linear(const HermitianOperator& a, const Condition& w, const SampleBudget& budget) {
  if (w.empty()) throw EmptySectionError("summarize_linear: empty condition");
  if (a.dim() != w.dim()) throw ValidationError("summarize_linear: dimension mismatch");
  if (budget.samples == 0) throw ValidationError("summarize_linear: sample budget must be >= 1");

  LinearSummary out;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double outer_lo = lo;
  double outer_hi = hi;
  bool exact = true;
  for (const auto& ball : w.balls()) {
    auto ext = linear_extrema(a, ball, budget);
    lo = std::min(lo, ext.lo);
    hi = std::max(hi, ext.hi);
    exact = exact && ext.exact;
    out.extremizers.push_back(std::move(ext.argmin));
    out.extremizers.push_back(std::move(ext.argmax));
    const auto outer = linear_outer_bound(a, ball);
    outer_lo = std::min(outer_lo, outer.lo);
    outer_hi = std::max(outer_hi, outer.hi);
  }
  out.samples = sample_states(w, budget.samples, budget.seed);
  for (const auto& rho : out.samples) {
    const double v = rho.expectation(a);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  out.exact = exact;
  out.range = {lo, hi, Rigor::ClosedForm, budget.samples, budget.seed};
  out.outer = {outer_lo, outer_hi};
  if (exact) {
    out.conservative = {lo, hi};
  } else {
    // Sampled and candidate extremes carry no guarantee away from the qubit
    // case; the spectral enclosure does.
    out.conservative = {std::min(outer_lo, lo), std::max(outer_hi, hi)};
  }
  return out;
}

}  // namespace qrlab
