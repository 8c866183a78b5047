#include "qrlab/state_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "qrlab/error.hpp"
#include "qrlab/parallel.hpp"
#include "qrlab/random.hpp"

namespace qrlab {

namespace {

void require_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a << " vs " << b << ")";
    throw ValidationError(os.str());
  }
}

/// Euclidean projection of v onto {x >= 0, sum x = 1}.
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) theta = candidate;
  }
  return (v.array() - theta).cwiseMax(0.0);
}

/// Tr|H| for a Hermitian matrix, with a closed form for 2x2.
double hermitian_trace_norm(const ComplexMatrix& h) {
  if (h.rows() == 2) {
    const double a = h(0, 0).real();
    const double d = h(1, 1).real();
    const double half_trace = 0.5 * (a + d);
    const double root = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(h(0, 1)));
    return std::abs(half_trace + root) + std::abs(half_trace - root);
  }
  return eigenvalues(h).cwiseAbs().sum();
}

}  // namespace

DensityState::DensityState(const ComplexMatrix& m) {
  const HermitianOperator h(m);  // square, finite, Hermitian
  const double trace = h.matrix().trace().real();
  if (std::abs(trace - 1.0) > kTraceTolerance) {
    std::ostringstream os;
    os << "DensityState: trace " << trace << " differs from 1";
    throw ValidationError(os.str());
  }
  const double min_eig = eigenvalues(h.matrix()).minCoeff();
  if (min_eig < -kPsdClampTolerance) {
    std::ostringstream os;
    os << "DensityState: negative eigenvalue " << min_eig;
    throw ValidationError(os.str());
  }
  if (min_eig < 0.0) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix());
    if (solver.info() != Eigen::Success) throw NumericError("DensityState: eigensolver did not converge");
    Eigen::VectorXd clamped = solver.eigenvalues().cwiseMax(0.0);
    clamped /= clamped.sum();
    m_ = solver.eigenvectors() * clamped.asDiagonal() * solver.eigenvectors().adjoint();
    m_ = 0.5 * (m_ + m_.adjoint()).eval();
  } else {
    m_ = h.matrix();
  }
}

DensityState DensityState::pure(const ComplexVector& psi) {
  const double norm = psi.norm();
  if (psi.size() == 0 || !std::isfinite(norm) || norm == 0.0)
    throw ValidationError("DensityState::pure: vector must be finite and nonzero");
  const ComplexVector v = psi / norm;
  ComplexMatrix m = v * v.adjoint();
  return DensityState(0.5 * (m + m.adjoint()), Trusted{});
}

DensityState DensityState::maximally_mixed(Eigen::Index dim) {
  if (dim < 1) throw ValidationError("maximally_mixed: dim must be >= 1");
  return DensityState(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim), Trusted{});
}

DensityState DensityState::basis(Eigen::Index dim, Eigen::Index k) {
  if (k < 0 || k >= dim) throw ValidationError("DensityState::basis: index out of range");
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  m(k, k) = 1.0;
  return DensityState(m, Trusted{});
}

DensityState DensityState::mix(const DensityState& a, const DensityState& b, double t) {
  require_dim(a.dim(), b.dim(), "DensityState::mix");
  if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("DensityState::mix: weight must lie in [0, 1]");
  return DensityState((1.0 - t) * a.m_ + t * b.m_, Trusted{});
}

DensityState project_to_states(const ComplexMatrix& hermitian) {
  const HermitianOperator h(hermitian);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) throw NumericError("project_to_states: eigensolver did not converge");
  const Eigen::VectorXd p = project_to_simplex(solver.eigenvalues());
  ComplexMatrix m = solver.eigenvectors() * p.asDiagonal() * solver.eigenvectors().adjoint();
  return DensityState(0.5 * (m + m.adjoint()), DensityState::Trusted{});
}

Ball::Ball(DensityState center, double radius) : center_(std::move(center)), radius_(radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ValidationError("Ball: radius must be positive and finite");
}

Condition::Condition(std::vector<Ball> balls, Eigen::Index dim) : balls_(std::move(balls)), dim_(dim) {
  for (const auto& b : balls_) require_dim(b.dim(), dim_, "Condition");
}

Condition::Condition(std::vector<Ball> balls) : balls_(std::move(balls)), dim_(0) {
  if (balls_.empty()) throw ValidationError("Condition: an empty ball list needs an explicit dimension");
  dim_ = balls_.front().dim();
  for (const auto& b : balls_) require_dim(b.dim(), dim_, "Condition");
}

Condition Condition::ball(const DensityState& center, double radius) {
  return Condition({Ball(center, radius)}, center.dim());
}

Condition Condition::empty(Eigen::Index dim) { return Condition({}, dim); }

Condition Condition::whole(Eigen::Index dim) {
  // Trace distance never exceeds 2, so radius 3 around I/dim covers everything.
  return ball(DensityState::maximally_mixed(dim), 3.0);
}

double trace_distance(const DensityState& a, const DensityState& b) {
  require_dim(a.dim(), b.dim(), "trace_distance");
  return hermitian_trace_norm(a.matrix() - b.matrix());
}

bool contains(const Ball& ball, const DensityState& rho) {
  return trace_distance(ball.center(), rho) + kBoundaryMargin < ball.radius();
}

bool contains(const Condition& w, const DensityState& rho) {
  require_dim(w.dim(), rho.dim(), "contains");
  return std::any_of(w.balls().begin(), w.balls().end(), [&](const Ball& b) { return contains(b, rho); });
}

bool ball_contains(const Ball& outer, const Ball& inner) {
  require_dim(outer.dim(), inner.dim(), "ball_contains");
  return trace_distance(outer.center(), inner.center()) + inner.radius() <= outer.radius() + kBoundaryMargin;
}

bool condition_contains(const Condition& outer, const Condition& inner) {
  require_dim(outer.dim(), inner.dim(), "condition_contains");
  return std::all_of(inner.balls().begin(), inner.balls().end(), [&](const Ball& b) {
    return std::any_of(outer.balls().begin(), outer.balls().end(),
                       [&](const Ball& o) { return ball_contains(o, b); });
  });
}

BallIntersection intersect_balls(const Ball& a, const Ball& b) {
  const double d = trace_distance(a.center(), b.center());
  BallIntersection out;
  if (!(d < a.radius() + b.radius() - 2.0 * kBoundaryMargin)) return out;
  // The witness sits on the segment between the centers, splitting the
  // overlap evenly; convexity keeps it inside state space.
  double t = 0.0;
  if (d > 0.0) t = std::clamp((d + a.radius() - b.radius()) / (2.0 * d), 0.0, 1.0);
  out.nonempty = true;
  out.witness = DensityState::mix(a.center(), b.center(), t);
  out.slack = std::min(a.radius() - t * d, b.radius() - (1.0 - t) * d);
  return out;
}

IntersectionResult conditions_intersect(const Condition& w1, const Condition& w2) {
  require_dim(w1.dim(), w2.dim(), "conditions_intersect");
  for (const auto& a : w1.balls())
    for (const auto& b : w2.balls()) {
      auto hit = intersect_balls(a, b);
      if (hit.nonempty) return {true, std::move(hit.witness)};
    }
  return {};
}

Condition intersection_cover(const Condition& w1, const Condition& w2) {
  require_dim(w1.dim(), w2.dim(), "intersection_cover");
  std::vector<Ball> cover;
  for (const auto& a : w1.balls())
    for (const auto& b : w2.balls()) {
      auto hit = intersect_balls(a, b);
      if (!hit.nonempty || !(hit.slack > 0.0)) continue;
      Ball candidate(*hit.witness, hit.slack);
      const bool redundant = std::any_of(cover.begin(), cover.end(),
                                         [&](const Ball& c) { return ball_contains(c, candidate); });
      if (redundant) continue;
      std::erase_if(cover, [&](const Ball& c) { return ball_contains(candidate, c); });
      cover.push_back(std::move(candidate));
    }
  return Condition(std::move(cover), w1.dim());
}

std::vector<DensityState> sample_states(const Condition& w, std::size_t n, std::uint64_t seed,
                                        const SamplerOptions& options) {
  if (n == 0) throw ValidationError("sample_states: n must be >= 1");
  if (w.empty()) throw ValidationError("sample_states: empty condition");
  constexpr std::size_t kAttemptsPerIndex = 10;
  const Eigen::Index dim = w.dim();
  const Eigen::Index support = options.support_dim > 0 ? std::min(options.support_dim, dim) : dim;

  std::vector<std::optional<DensityState>> slots(n);
  std::vector<std::size_t> attempts(n, 0);

  parallel_for(n, [&](std::size_t i) {
    for (std::size_t attempt = 0; attempt < kAttemptsPerIndex; ++attempt) {
      ++attempts[i];
      auto rng = substream(seed, Stream::StateSampler, i, attempt);
      const auto& ball = w.balls()[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(w.balls().size()))];
      const auto& c = ball.center();
      const double r = ball.radius();
      // Bias the relative radius toward the boundary, where extrema live.
      const double s = std::pow(uniform01(rng), 0.25);
      if (uniform01(rng) < 0.5) {
        // Mix the center with a random pure state along a straight segment;
        // the distance along the segment is exactly w * D.
        const auto psi = DensityState::pure(random_unit_vector(dim, rng, support));
        const double span = hermitian_trace_norm(psi.matrix() - c.matrix());
        if (span <= 0.0) {
          slots[i] = c;
          return;
        }
        const double weight = std::min(1.0, s * r / span);
        if (weight * span + kBoundaryMargin < r) {
          slots[i] = DensityState::mix(c, psi, weight);
          return;
        }
      } else {
        // Traceless perturbation of unit trace norm, then back onto states.
        ComplexMatrix h = random_hermitian(dim, rng, support);
        const Complex tr = h.trace();
        for (Eigen::Index k = 0; k < support; ++k) h(k, k) -= tr / static_cast<double>(support);
        const double norm = hermitian_trace_norm(h);
        if (norm <= 0.0) continue;
        auto candidate = project_to_states(c.matrix() + (s * r / norm) * h);
        if (contains(ball, candidate)) {
          slots[i] = std::move(candidate);
          return;
        }
      }
    }
  });

  std::vector<DensityState> out;
  out.reserve(n);
  const std::size_t total_attempts = std::accumulate(attempts.begin(), attempts.end(), std::size_t{0});
  for (auto& slot : slots) {
    if (!slot) {
      std::ostringstream os;
      os << "sample_states: rejection limit reached (acceptance rate "
         << static_cast<double>(std::count_if(slots.begin(), slots.end(), [](auto& s) { return s.has_value(); })) /
                static_cast<double>(total_attempts)
         << " over " << total_attempts << " attempts)";
      throw NumericError(os.str());
    }
    out.push_back(std::move(*slot));
  }
  return out;
}

std::vector<double> max_sampled_distance(const Condition& w, const std::vector<DensityState>& samples) {
  std::vector<double> out(w.balls().size(), 0.0);
  for (const auto& rho : samples) {
    std::size_t best = 0;
    double best_depth = -std::numeric_limits<double>::infinity();
    double best_distance = 0.0;
    for (std::size_t k = 0; k < w.balls().size(); ++k) {
      const double d = trace_distance(w.balls()[k].center(), rho);
      const double depth = w.balls()[k].radius() - d;
      if (depth > best_depth) {
        best_depth = depth;
        best = k;
        best_distance = d;
      }
    }
    if (!w.balls().empty()) out[best] = std::max(out[best], best_distance);
  }
  return out;
}

DensityState perturb_nonzero(const DensityState& rho, const HermitianOperator& a, double eps,
                             std::optional<double> t) {
  require_dim(rho.dim(), a.dim(), "perturb_nonzero");
  if (!(eps > 0.0)) throw ValidationError("perturb_nonzero: eps must be positive");
  const auto spec = eig_decompose(a);
  const double value = rho.expectation(a);
  Eigen::Index best = 0;
  double best_gap = -1.0;
  for (Eigen::Index k = 0; k < spec.raw_eigenvalues.size(); ++k) {
    const double gap = std::abs(spec.raw_eigenvalues(k) - value);
    if (gap >= best_gap) {  // ties resolve to the larger eigenvalue
      best_gap = gap;
      best = k;
    }
  }
  const double scale = std::max(1.0, spec.raw_eigenvalues.cwiseAbs().maxCoeff());
  if (best_gap <= 1e-14 * scale)
    throw ValidationError("perturb_nonzero: no eigenvalue differs from Tr(rho A); the operator is constant on states");

  const auto phi = DensityState::pure(spec.eigenvectors.col(best));
  const double span = trace_distance(rho, phi);
  double weight = 0.0;
  if (t) {
    weight = *t;
    if (!(weight > 0.0 && weight <= 1.0)) throw ValidationError("perturb_nonzero: t must lie in (0, 1]");
    if (!(weight * span < eps)) throw ValidationError("perturb_nonzero: t * Tr|phi - rho| must stay below eps");
  } else {
    weight = std::min(1.0, 0.5 * eps / span);
  }
  auto sigma = DensityState::mix(rho, phi, weight);
  if (sigma.expectation(a) == value)
    throw NumericError("perturb_nonzero: perturbation below floating-point resolution");
  return sigma;
}

DensityState conjugate(const DensityState& rho, const ComplexMatrix& u) {
  if (!is_unitary(u)) throw ValidationError("conjugate: matrix is not unitary");
  require_dim(rho.dim(), u.rows(), "conjugate");
  return DensityState(u * rho.matrix() * u.adjoint());
}

Condition conjugate(const Condition& w, const ComplexMatrix& u) {
  std::vector<Ball> balls;
  balls.reserve(w.balls().size());
  for (const auto& b : w.balls()) balls.emplace_back(conjugate(b.center(), u), b.radius());
  return Condition(std::move(balls), w.dim());
}

}  // namespace qrlab
