#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qrlab/operator_core.hpp"

namespace qrlab {

inline constexpr double kPsdClampTolerance = 1e-10;
inline constexpr double kTraceTolerance = 1e-10;
/// Margin used to decide strict inequalities (d < r) deterministically.
inline constexpr double kBoundaryMargin = 1e-12;

/// A point of state space: positive semidefinite, unit trace.
class DensityState {
 public:
  /// Validates Hermiticity, positivity (eigenvalues >= -1e-10 are clamped to 0)
  /// and unit trace.
  explicit DensityState(const ComplexMatrix& m);

  static DensityState pure(const ComplexVector& psi);
  static DensityState maximally_mixed(Eigen::Index dim);
  /// |k><k| in the computational basis.
  static DensityState basis(Eigen::Index dim, Eigen::Index k);
  /// (1 - t) a + t b for t in [0, 1]; closed under convexity, so unchecked.
  static DensityState mix(const DensityState& a, const DensityState& b, double t);

  const ComplexMatrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  double expectation(const HermitianOperator& a) const { return a.expectation(m_); }

 private:
  struct Trusted {};
  DensityState(ComplexMatrix m, Trusted) : m_(std::move(m)) {}
  friend DensityState project_to_states(const ComplexMatrix& hermitian);

  ComplexMatrix m_;
};

/// Nearest state to a Hermitian matrix in Frobenius norm: eigenvalues are
/// projected onto the probability simplex.
DensityState project_to_states(const ComplexMatrix& hermitian);

/// Trace-norm ball nu(center; radius), intersected with state space.
class Ball {
 public:
  Ball(DensityState center, double radius);

  const DensityState& center() const { return center_; }
  double radius() const { return radius_; }
  Eigen::Index dim() const { return center_.dim(); }

 private:
  DensityState center_;
  double radius_;
};

/// Open region of state space given as a finite union of balls. The empty
/// union is allowed and represents the empty region.
class Condition {
 public:
  Condition(std::vector<Ball> balls, Eigen::Index dim);
  explicit Condition(std::vector<Ball> balls);

  static Condition ball(const DensityState& center, double radius);
  static Condition empty(Eigen::Index dim);
  /// A ball around I/dim large enough to cover every state.
  static Condition whole(Eigen::Index dim);

  const std::vector<Ball>& balls() const { return balls_; }
  Eigen::Index dim() const { return dim_; }
  bool empty() const { return balls_.empty(); }

 private:
  std::vector<Ball> balls_;
  Eigen::Index dim_;
};

/// Tr|rho1 - rho2|.
double trace_distance(const DensityState& a, const DensityState& b);

bool contains(const Ball& ball, const DensityState& rho);
bool contains(const Condition& w, const DensityState& rho);

/// Sufficient test for inner being a subset of outer:
/// d(centers) + r_inner <= r_outer. Never claims a false containment.
bool ball_contains(const Ball& outer, const Ball& inner);
/// True when every ball of inner sits inside some ball of outer.
bool condition_contains(const Condition& outer, const Condition& inner);

struct BallIntersection {
  bool nonempty = false;
  std::optional<DensityState> witness;
  /// Radius of the largest ball around the witness inside both balls.
  double slack = 0.0;
};

/// Exact emptiness test for two balls using convexity of state space.
BallIntersection intersect_balls(const Ball& a, const Ball& b);

struct IntersectionResult {
  bool nonempty = false;
  std::optional<DensityState> witness;
};

IntersectionResult conditions_intersect(const Condition& w1, const Condition& w2);

/// Inner approximation of w1 ∩ w2: one witness ball per intersecting ball pair.
Condition intersection_cover(const Condition& w1, const Condition& w2);

struct SamplerOptions {
  /// Restrict random directions to the first `support_dim` basis vectors
  /// (0 = no restriction).
  Eigen::Index support_dim = 0;
};

/// n states inside w, deterministic in (seed, index). Throws NumericError if
/// more than 10 n attempts are rejected.
std::vector<DensityState> sample_states(const Condition& w, std::size_t n, std::uint64_t seed,
                                        const SamplerOptions& options = {});

/// Largest trace distance from the owning ball's center among the samples,
/// per ball of w (a sample is attributed to the ball it lies deepest in).
std::vector<double> max_sampled_distance(const Condition& w, const std::vector<DensityState>& samples);

/// sigma = (1 - t) rho + t |phi><phi|, phi an eigenvector of A whose
/// eigenvalue is farthest from Tr(rho A). Guarantees Tr(sigma A) != Tr(rho A)
/// and trace_distance(rho, sigma) < eps. If t is omitted it is chosen so the
/// distance equals eps / 2.
DensityState perturb_nonzero(const DensityState& rho, const HermitianOperator& a, double eps,
                             std::optional<double> t = std::nullopt);

/// Unitary conjugation U rho U^dagger (trace distance preserving).
DensityState conjugate(const DensityState& rho, const ComplexMatrix& u);
/// Image of every ball under rho -> U rho U^dagger.
Condition conjugate(const Condition& w, const ComplexMatrix& u);

}  // namespace qrlab
