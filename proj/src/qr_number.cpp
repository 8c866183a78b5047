#include "qrlab/qr_number.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "qrlab/error.hpp"

namespace qrlab {

namespace {

using Node = QrNumber::Node;
using NodePtr = QrNumber::NodePtr;

constexpr double kInf = std::numeric_limits<double>::infinity();

bool same_condition(const Condition& a, const Condition& b) {
  if (a.dim() != b.dim() || a.balls().size() != b.balls().size()) return false;
  for (std::size_t k = 0; k < a.balls().size(); ++k) {
    const auto& x = a.balls()[k];
    const auto& y = b.balls()[k];
    if (x.radius() != y.radius() || x.center().matrix() != y.center().matrix()) return false;
  }
  return true;
}

double evaluate(const Node& n, const DensityState& rho) {
  switch (n.kind) {
    case Node::Kind::Linear:
      return rho.expectation(n.leaf->op());
    case Node::Kind::Constant:
      return n.value;
    case Node::Kind::Add:
      return evaluate(*n.lhs, rho) + evaluate(*n.rhs, rho);
    case Node::Kind::Sub:
      return evaluate(*n.lhs, rho) - evaluate(*n.rhs, rho);
    case Node::Kind::Mul:
      return evaluate(*n.lhs, rho) * evaluate(*n.rhs, rho);
    case Node::Kind::Scale:
      return n.value * evaluate(*n.lhs, rho);
    case Node::Kind::Apply:
      return (*n.fn)(evaluate(*n.lhs, rho));
  }
  throw Error("evaluate: unknown node kind");
}

Interval hull(std::initializer_list<double> xs) {
  return {std::min(xs), std::max(xs)};
}

Interval mul(const Interval& a, const Interval& b) {
  return hull({a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi});
}

// Range of sin over [lo, hi].
Interval sin_range(const Interval& x) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (x.width() >= two_pi) return {-1.0, 1.0};
  Interval out = hull({std::sin(x.lo), std::sin(x.hi)});
  // Critical points pi/2 + k pi inside the interval.
  const double first = std::ceil((x.lo - std::numbers::pi / 2) / std::numbers::pi);
  for (double k = first; std::numbers::pi / 2 + k * std::numbers::pi <= x.hi; k += 1.0) {
    const double v = std::sin(std::numbers::pi / 2 + k * std::numbers::pi);
    out.lo = std::min(out.lo, v);
    out.hi = std::max(out.hi, v);
  }
  return out;
}

Interval apply_range(const ContinuousFunction& f, const Interval& x) {
  using K = ContinuousFunction::Kind;
  switch (f.kind) {
    case K::Abs:
      if (x.lo >= 0.0) return x;
      if (x.hi <= 0.0) return {-x.hi, -x.lo};
      return {0.0, std::max(-x.lo, x.hi)};
    case K::SqrtPlus:
      return {std::sqrt(std::max(0.0, x.lo)), std::sqrt(std::max(0.0, x.hi))};
    case K::Exp:
      return {std::exp(x.lo), std::exp(x.hi)};
    case K::Sin:
      return sin_range(x);
    case K::Cos:
      return sin_range({x.lo + std::numbers::pi / 2, x.hi + std::numbers::pi / 2});
    case K::Polynomial: {
      // Horner in interval arithmetic.
      Interval acc{0.0, 0.0};
      for (auto it = f.coefficients.rbegin(); it != f.coefficients.rend(); ++it) {
        acc = mul(acc, x);
        acc = {acc.lo + *it, acc.hi + *it};
      }
      return acc;
    }
  }
  throw Error("apply_range: unknown function");
}

// Sup of |f'| over x.
double derivative_bound(const ContinuousFunction& f, const Interval& x) {
  using K = ContinuousFunction::Kind;
  switch (f.kind) {
    case K::Abs:
    case K::Sin:
    case K::Cos:
      return 1.0;
    case K::SqrtPlus:
      if (x.lo <= 0.0) return kInf;
      return 0.5 / std::sqrt(x.lo);
    case K::Exp:
      return std::exp(x.hi);
    case K::Polynomial: {
      Interval acc{0.0, 0.0};
      for (std::size_t k = f.coefficients.size(); k-- > 1;) {
        acc = mul(acc, x);
        const double c = static_cast<double>(k) * f.coefficients[k];
        acc = {acc.lo + c, acc.hi + c};
      }
      return std::max(std::abs(acc.lo), std::abs(acc.hi));
    }
  }
  throw Error("derivative_bound: unknown function");
}

Interval node_enclosure(const Node& n, const Condition& extent) {
  switch (n.kind) {
    case Node::Kind::Linear: {
      Interval out{kInf, -kInf};
      for (const auto& ball : extent.balls()) {
        const auto b = linear_outer_bound(n.leaf->op(), ball);
        out.lo = std::min(out.lo, b.lo);
        out.hi = std::max(out.hi, b.hi);
      }
      return out;
    }
    case Node::Kind::Constant:
      return {n.value, n.value};
    case Node::Kind::Add: {
      const auto a = node_enclosure(*n.lhs, extent);
      const auto b = node_enclosure(*n.rhs, extent);
      return {a.lo + b.lo, a.hi + b.hi};
    }
    case Node::Kind::Sub: {
      const auto a = node_enclosure(*n.lhs, extent);
      const auto b = node_enclosure(*n.rhs, extent);
      return {a.lo - b.hi, a.hi - b.lo};
    }
    case Node::Kind::Mul:
      return mul(node_enclosure(*n.lhs, extent), node_enclosure(*n.rhs, extent));
    case Node::Kind::Scale: {
      const auto a = node_enclosure(*n.lhs, extent);
      return hull({n.value * a.lo, n.value * a.hi});
    }
    case Node::Kind::Apply:
      return apply_range(*n.fn, node_enclosure(*n.lhs, extent));
  }
  throw Error("node_enclosure: unknown node kind");
}

double sup_abs(const Interval& x) { return std::max(std::abs(x.lo), std::abs(x.hi)); }

double node_lipschitz(const Node& n, const Condition& extent) {
  switch (n.kind) {
    case Node::Kind::Linear:
      return linear_lipschitz(n.leaf->op());
    case Node::Kind::Constant:
      return 0.0;
    case Node::Kind::Add:
    case Node::Kind::Sub:
      return node_lipschitz(*n.lhs, extent) + node_lipschitz(*n.rhs, extent);
    case Node::Kind::Mul:
      return sup_abs(node_enclosure(*n.lhs, extent)) * node_lipschitz(*n.rhs, extent) +
             sup_abs(node_enclosure(*n.rhs, extent)) * node_lipschitz(*n.lhs, extent);
    case Node::Kind::Scale:
      return std::abs(n.value) * node_lipschitz(*n.lhs, extent);
    case Node::Kind::Apply: {
      const double inner = node_lipschitz(*n.lhs, extent);
      if (inner == 0.0) return 0.0;
      return derivative_bound(*n.fn, node_enclosure(*n.lhs, extent)) * inner;
    }
  }
  throw Error("node_lipschitz: unknown node kind");
}

QrNumber combine(Node::Kind kind, const QrNumber& a, const QrNumber& b) {
  if (a.dim() != b.dim()) throw ValidationError("qr arithmetic: dimension mismatch");
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->lhs = a.root();
  node->rhs = b.root();
  return QrNumber(node, common_extent(a.extent(), b.extent()));
}

}  // namespace

// ---- LocallyLinearQr ----

LocallyLinearQr::LocallyLinearQr(HermitianOperator op, Condition extent)
    : op_(std::move(op)), extent_(std::move(extent)) {
  if (op_.dim() != extent_.dim()) throw ValidationError("LocallyLinearQr: operator and extent dimensions differ");
  if (extent_.empty()) throw EmptySectionError("LocallyLinearQr: empty extent");
}

double LocallyLinearQr::eval_at(const DensityState& rho) const {
  if (!contains(extent_, rho)) throw ExtentError("eval_at: state lies outside the extent");
  return rho.expectation(op_);
}

// ---- ContinuousFunction ----

ContinuousFunction ContinuousFunction::named(std::string_view name, std::vector<double> coefficients) {
  ContinuousFunction f;
  if (name == "abs") f.kind = Kind::Abs;
  else if (name == "sqrt+" || name == "sqrt") f.kind = Kind::SqrtPlus;
  else if (name == "exp") f.kind = Kind::Exp;
  else if (name == "sin") f.kind = Kind::Sin;
  else if (name == "cos") f.kind = Kind::Cos;
  else if (name == "poly" || name == "polynomial") return polynomial(std::move(coefficients));
  else throw ValidationError("unknown function '" + std::string(name) + "' (expected abs, sqrt+, exp, sin, cos, poly)");
  return f;
}

ContinuousFunction ContinuousFunction::polynomial(std::vector<double> coefficients) {
  if (coefficients.empty()) throw ValidationError("polynomial: needs at least one coefficient");
  for (double c : coefficients)
    if (!std::isfinite(c)) throw ValidationError("polynomial: non-finite coefficient");
  ContinuousFunction f;
  f.kind = Kind::Polynomial;
  f.coefficients = std::move(coefficients);
  return f;
}

double ContinuousFunction::operator()(double x) const {
  switch (kind) {
    case Kind::Abs:
      return std::abs(x);
    case Kind::SqrtPlus:
      if (x < 0.0) {
        std::ostringstream os;
        os << "sqrt+: negative argument " << x;
        throw DomainError(os.str());
      }
      return std::sqrt(x);
    case Kind::Exp:
      return std::exp(x);
    case Kind::Sin:
      return std::sin(x);
    case Kind::Cos:
      return std::cos(x);
    case Kind::Polynomial: {
      double acc = 0.0;
      for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * x + *it;
      return acc;
    }
  }
  throw Error("ContinuousFunction: unknown kind");
}

std::string ContinuousFunction::name() const {
  switch (kind) {
    case Kind::Abs: return "abs";
    case Kind::SqrtPlus: return "sqrt+";
    case Kind::Exp: return "exp";
    case Kind::Sin: return "sin";
    case Kind::Cos: return "cos";
    case Kind::Polynomial: return "poly";
  }
  return "?";
}

// ---- QrNumber ----

QrNumber::QrNumber(NodePtr root, Condition extent) : root_(std::move(root)), extent_(std::move(extent)) {
  if (!root_) throw ValidationError("QrNumber: null expression");
}

QrNumber QrNumber::linear(const LocallyLinearQr& qr) {
  auto node = std::make_shared<Node>();
  node->kind = Node::Kind::Linear;
  node->leaf = qr;
  return QrNumber(node, qr.extent());
}

QrNumber QrNumber::linear(const HermitianOperator& op, const Condition& extent) {
  return linear(LocallyLinearQr(op, extent));
}

QrNumber QrNumber::constant(double value, const Condition& extent) {
  if (!std::isfinite(value)) throw ValidationError("QrNumber::constant: value must be finite");
  if (extent.empty()) throw EmptySectionError("QrNumber::constant: empty extent");
  auto node = std::make_shared<Node>();
  node->kind = Node::Kind::Constant;
  node->value = value;
  node->constant_extent = extent;
  return QrNumber(node, extent);
}

double QrNumber::eval_at(const DensityState& rho) const {
  if (rho.dim() != dim()) throw ValidationError("eval_at: state dimension differs from the section's");
  if (!contains(extent_, rho)) throw ExtentError("eval_at: state lies outside the extent");
  return evaluate(*root_, rho);
}

double QrNumber::eval_unchecked(const DensityState& rho) const { return evaluate(*root_, rho); }

std::optional<LocallyLinearQr> QrNumber::as_linear() const {
  if (root_->kind != Node::Kind::Linear) return std::nullopt;
  return LocallyLinearQr(root_->leaf->op(), extent_);
}

double eval_at(const QrNumber& q, const DensityState& rho) { return q.eval_at(rho); }

Condition common_extent(const Condition& a, const Condition& b) {
  if (same_condition(a, b)) return a;
  auto cover = intersection_cover(a, b);
  if (cover.empty()) throw EmptySectionError("extents do not intersect");
  return cover;
}

QrNumber qr_add(const QrNumber& a, const QrNumber& b) { return combine(Node::Kind::Add, a, b); }
QrNumber qr_sub(const QrNumber& a, const QrNumber& b) { return combine(Node::Kind::Sub, a, b); }
QrNumber qr_mul(const QrNumber& a, const QrNumber& b) { return combine(Node::Kind::Mul, a, b); }

QrNumber qr_scale(const QrNumber& a, double factor) {
  if (!std::isfinite(factor)) throw ValidationError("qr_scale: factor must be finite");
  auto node = std::make_shared<Node>();
  node->kind = Node::Kind::Scale;
  node->value = factor;
  node->lhs = a.root();
  return QrNumber(node, a.extent());
}

QrNumber qr_apply(const ContinuousFunction& f, const QrNumber& a) {
  auto node = std::make_shared<Node>();
  node->kind = Node::Kind::Apply;
  node->fn = f;
  node->lhs = a.root();
  return QrNumber(node, a.extent());
}

QrNumber qr_restrict(const QrNumber& a, const Condition& v) {
  if (v.empty()) throw EmptySectionError("qr_restrict: empty condition");
  if (!condition_contains(a.extent(), v))
    throw ExtentError("qr_restrict: the new condition is not inside the section's extent");
  return QrNumber(a.root(), v);
}

RangeInterval eval_range(const QrNumber& q, const SampleBudget& budget) {
  if (budget.samples == 0) throw ValidationError("eval_range: sample budget must be >= 1");
  if (auto leaf = q.as_linear()) return summarize_linear(leaf->op(), q.extent(), budget).range;

  double lo = kInf;
  double hi = -kInf;
  auto take = [&](const DensityState& rho) {
    const double v = q.eval_unchecked(rho);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  };
  for (const auto& ball : q.extent().balls()) take(ball.center());
  for (const auto& rho : sample_states(q.extent(), budget.samples, budget.seed)) take(rho);
  return {lo, hi, Rigor::Sampled, budget.samples, budget.seed};
}

Interval enclosure(const QrNumber& q) { return node_enclosure(*q.root(), q.extent()); }

double lipschitz_bound(const QrNumber& q) { return node_lipschitz(*q.root(), q.extent()); }

Condition order_extent(const QrNumber& a, const QrNumber& b, double grain, const SampleBudget& budget) {
  if (!(grain > 0.0)) throw ValidationError("order_extent: grain must be positive");
  if (a.dim() != b.dim()) throw ValidationError("order_extent: dimension mismatch");
  Condition common = Condition::empty(a.dim());
  try {
    common = common_extent(a.extent(), b.extent());
  } catch (const EmptySectionError&) {
    return common;
  }
  const double lip = lipschitz_bound(a) + lipschitz_bound(b);

  std::vector<DensityState> points;
  for (const auto& ball : common.balls()) points.push_back(ball.center());
  auto samples = sample_states(common, budget.samples, budget.seed);
  points.insert(points.end(), samples.begin(), samples.end());

  std::vector<Ball> balls;
  for (const auto& rho : points) {
    const double gap = b.eval_unchecked(rho) - a.eval_unchecked(rho);
    if (!(gap > 0.0)) continue;
    double radius = std::min(grain, lip > 0.0 ? gap / lip : kInf);
    double depth = 0.0;
    for (const auto& ball : common.balls())
      depth = std::max(depth, ball.radius() - trace_distance(ball.center(), rho));
    radius = std::min(radius, depth - kBoundaryMargin);
    if (!(radius > 1e-12)) continue;
    Ball candidate(rho, radius);
    const bool redundant =
        std::any_of(balls.begin(), balls.end(), [&](const Ball& c) { return ball_contains(c, candidate); });
    if (!redundant) balls.push_back(std::move(candidate));
  }
  return Condition(std::move(balls), a.dim());
}

double ExtendedQr::eval_at(const DensityState& rho) const {
  if (rho.dim() != q_.dim()) throw ValidationError("eval_at: state dimension differs from the section's");
  if (!contains(q_.extent(), rho)) return 0.0;
  return q_.eval_unchecked(rho);
}

RangeInterval ExtendedQr::range_over_state_space(const SampleBudget& budget) const {
  auto inside = eval_range(q_, budget);
  bool outside = false;
  const Eigen::Index dim = q_.dim();
  for (Eigen::Index k = 0; k < dim && !outside; ++k) outside = !contains(q_.extent(), DensityState::basis(dim, k));
  if (!outside) outside = !contains(q_.extent(), DensityState::maximally_mixed(dim));
  if (!outside)
    for (const auto& rho : sample_states(Condition::whole(dim), budget.samples, budget.seed))
      if (!contains(q_.extent(), rho)) {
        outside = true;
        break;
      }
  if (outside) {
    inside.lo = std::min(inside.lo, 0.0);
    inside.hi = std::max(inside.hi, 0.0);
  }
  inside.rigor = Rigor::Sampled;
  return inside;
}

ExtendedQr extend_by_zero(const QrNumber& q) { return ExtendedQr(q); }

LocallyLinearQr covariance_transform(const LocallyLinearQr& q, const ComplexMatrix& u) {
  if (u.rows() != q.dim() || !is_unitary(u)) throw ValidationError("covariance_transform: U must be a unitary of matching dimension");
  const HermitianOperator rotated(u * q.op().matrix() * u.adjoint());
  return LocallyLinearQr(rotated, conjugate(q.extent(), u));
}

Condition pull_back(const Condition& w, const ComplexMatrix& u) {
  if (u.rows() != w.dim() || !is_unitary(u)) throw ValidationError("pull_back: U must be a unitary of matching dimension");
  return conjugate(w, u.adjoint());
}

RationalApproximation rational_approximation(const QrNumber& q, double tolerance, const SampleBudget& budget) {
  if (!(tolerance > 0.0) || !std::isfinite(tolerance))
    throw ValidationError("rational_approximation: tolerance must be positive and finite");
  // Smallest power-of-two denominator whose grid spacing is <= tolerance / 2.
  std::int64_t denominator = 1;
  int guard = 0;
  while (1.0 / static_cast<double>(denominator) > 0.5 * tolerance) {
    if (++guard > 60) throw NumericError("rational_approximation: tolerance below representable precision");
    denominator *= 2;
  }
  const auto range = eval_range(q, budget);
  const double scaled = std::round(range.midpoint() * static_cast<double>(denominator));
  if (std::abs(scaled) > 9.0e18) throw NumericError("rational_approximation: value out of range");

  RationalApproximation out;
  out.numerator = static_cast<std::int64_t>(scaled);
  out.denominator = denominator;
  out.value = static_cast<double>(out.numerator) / static_cast<double>(denominator);
  const auto deviation =
      qr_apply(ContinuousFunction::named("abs"), qr_sub(q, QrNumber::constant(out.value, q.extent())));
  out.condition = order_extent(deviation, QrNumber::constant(tolerance, q.extent()), 0.5, budget);
  return out;
}

}  // namespace qrlab
