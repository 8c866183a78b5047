#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qrlab/operator_core.hpp"
#include "qrlab/state_space.hpp"

namespace qrlab {

/// Monte-Carlo budget for suprema/infima over a condition.
struct SampleBudget {
  std::size_t samples = 256;
  std::uint64_t seed = 0;
  /// Local-search steps used to polish closed-form candidates (dim <= 16 only).
  std::size_t refine_steps = 48;
};

enum class Rigor { ClosedForm, Sampled };

/// Numeric summary [lo, hi] of the values a section takes on its extent.
struct RangeInterval {
  double lo = 0.0;
  double hi = 0.0;
  Rigor rigor = Rigor::Sampled;
  std::size_t samples = 0;
  std::uint64_t seed = 0;

  Interval interval() const { return {lo, hi}; }
  double midpoint() const { return 0.5 * (lo + hi); }
};

/// rho -> Tr(rho A) restricted to an extent.
class LocallyLinearQr {
 public:
  LocallyLinearQr(HermitianOperator op, Condition extent);

  const HermitianOperator& op() const { return op_; }
  const Condition& extent() const { return extent_; }
  Eigen::Index dim() const { return op_.dim(); }

  double eval_at(const DensityState& rho) const;

 private:
  HermitianOperator op_;
  Condition extent_;
};

/// Whitelisted continuous real functions for qr_apply.
struct ContinuousFunction {
  enum class Kind { Abs, SqrtPlus, Exp, Sin, Cos, Polynomial };

  Kind kind = Kind::Abs;
  /// Polynomial coefficients, ascending powers.
  std::vector<double> coefficients;

  static ContinuousFunction named(std::string_view name, std::vector<double> coefficients = {});
  static ContinuousFunction polynomial(std::vector<double> coefficients);

  /// Throws DomainError for sqrt+ of a negative argument.
  double operator()(double x) const;
  std::string name() const;
};

/// A section over a condition: an expression tree whose leaves are locally
/// linear or locally constant sections. The extent is the intersection of
/// the leaf extents (inner cover).
class QrNumber {
 public:
  struct Node {
    enum class Kind { Linear, Constant, Add, Sub, Mul, Scale, Apply };
    Kind kind = Kind::Constant;
    std::optional<LocallyLinearQr> leaf;
    double value = 0.0;  // constant value or scale factor
    std::optional<Condition> constant_extent;
    std::optional<ContinuousFunction> fn;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
  };
  using NodePtr = std::shared_ptr<const Node>;

  static QrNumber linear(const LocallyLinearQr& qr);
  static QrNumber linear(const HermitianOperator& op, const Condition& extent);
  static QrNumber constant(double value, const Condition& extent);

  const Condition& extent() const { return extent_; }
  Eigen::Index dim() const { return extent_.dim(); }
  const NodePtr& root() const { return root_; }

  /// Throws ExtentError when rho lies outside the extent.
  double eval_at(const DensityState& rho) const;
  /// Same recursion without the membership check.
  double eval_unchecked(const DensityState& rho) const;

  /// The leaf, when the expression is a single locally linear generator.
  std::optional<LocallyLinearQr> as_linear() const;

  QrNumber(NodePtr root, Condition extent);

 private:
  NodePtr root_;
  Condition extent_;
};

double eval_at(const QrNumber& q, const DensityState& rho);

QrNumber qr_add(const QrNumber& a, const QrNumber& b);
QrNumber qr_sub(const QrNumber& a, const QrNumber& b);
QrNumber qr_mul(const QrNumber& a, const QrNumber& b);
QrNumber qr_scale(const QrNumber& a, double factor);
QrNumber qr_apply(const ContinuousFunction& f, const QrNumber& a);
/// Same expression over a smaller extent; v must be inside a's extent.
QrNumber qr_restrict(const QrNumber& a, const Condition& v);

/// Common extent of two sections (inner cover of the intersection). Throws
/// EmptySectionError when the extents are disjoint.
Condition common_extent(const Condition& a, const Condition& b);

/// [min, max] of the section over its extent. Single locally linear leaves
/// use closed-form extremizers (exact on qubits) refined by sampling; other
/// expressions are estimated from samples. Larger sample counts with the same
/// seed never shrink the interval.
RangeInterval eval_range(const QrNumber& q, const SampleBudget& budget);

/// Sound outer enclosure of the section's values (interval arithmetic over
/// closed-form bounds of the linear leaves).
Interval enclosure(const QrNumber& q);

/// Lipschitz constant with respect to trace distance on the extent.
double lipschitz_bound(const QrNumber& q);

// ---- locally linear functionals over balls ----

struct LinearExtrema {
  double lo = 0.0;
  double hi = 0.0;
  DensityState argmin;
  DensityState argmax;
  bool exact = false;  // qubit closed form
};

/// Extremes of Tr(rho A) over a ball. Exact for qubits (Bloch geometry);
/// otherwise the best of closed-form candidates plus local refinement.
LinearExtrema linear_extrema(const HermitianOperator& a, const Ball& ball, const SampleBudget& budget);

/// Sound enclosure of Tr(rho A) over a ball:
/// [max(l_min, a_c - r s/2), min(l_max, a_c + r s/2)], s the spectral spread.
Interval linear_outer_bound(const HermitianOperator& a, const Ball& ball);

/// Range summary of a linear functional used by the measurement predicates.
struct LinearSummary {
  RangeInterval range;
  Interval outer;
  /// Exact range on qubits, the sound outer enclosure otherwise.
  Interval conservative;
  std::vector<DensityState> extremizers;
  std::vector<DensityState> samples;
  bool exact = false;
};

LinearSummary summarize_linear(const HermitianOperator& a, const Condition& w, const SampleBudget& budget);

/// Half the spectral spread: the Lipschitz constant of Tr(rho A) in trace distance.
double linear_lipschitz(const HermitianOperator& a);

// ---- order, extension, covariance, rational approximation ----

/// Sub-condition of the common extent on which a < b throughout: balls around
/// sampled states with a < b, radius (b - a) / (Lip a + Lip b) capped at grain.
/// May be empty.
Condition order_extent(const QrNumber& a, const QrNumber& b, double grain, const SampleBudget& budget);

/// Prolongation by zero: defined on every state.
class ExtendedQr {
 public:
  explicit ExtendedQr(QrNumber q) : q_(std::move(q)) {}

  const QrNumber& section() const { return q_; }
  double eval_at(const DensityState& rho) const;
  /// Range over all of state space (0 joins when some state lies outside the extent).
  RangeInterval range_over_state_space(const SampleBudget& budget) const;

 private:
  QrNumber q_;
};

ExtendedQr extend_by_zero(const QrNumber& q);

/// Covariant image under U: operator U A U^dagger over extent U W U^dagger, so
/// that the value at U rho U^dagger equals the original value at rho.
LocallyLinearQr covariance_transform(const LocallyLinearQr& q, const ComplexMatrix& u);

/// W' = U^dagger W U; (U A U^dagger) over W has the values of A over W'.
Condition pull_back(const Condition& w, const ComplexMatrix& u);

struct RationalApproximation {
  std::int64_t numerator = 0;
  std::int64_t denominator = 1;  // a power of two
  double value = 0.0;
  /// Where |q - value| < tolerance holds throughout.
  Condition condition{std::vector<Ball>{}, 1};
};

/// Locally constant dyadic rational within `tolerance` of q on a sub-condition.
RationalApproximation rational_approximation(const QrNumber& q, double tolerance, const SampleBudget& budget);

}  // namespace qrlab
