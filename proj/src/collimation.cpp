#include "qrlab/collimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qrlab/error.hpp"

namespace qrlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate(const HermitianOperator& a, const Interval& interval, double eps, const Condition& w) {
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("collimation: eps must lie in (0, 1)");
  make_interval(interval.lo, interval.hi);
  if (w.empty()) throw EmptySectionError("collimation: empty condition");
  if (a.dim() != w.dim()) throw ValidationError("collimation: operator and condition dimensions differ");
}

// Tr(rho (A - a)^2) with a = Tr(rho A), clamped at 0.
double variance(const HermitianOperator& a, const DensityState& rho) {
  const double mean = rho.expectation(a);
  const ComplexMatrix centered = a.matrix() - mean * ComplexMatrix::Identity(a.dim(), a.dim());
  const double v = (rho.matrix() * centered * centered).trace().real();
  return std::max(0.0, v);
}

// Sound supremum of f over w from its values at the ball centers:
// f < f(c) + lip * r inside a ball of radius r.
double center_bound(const Condition& w, double lip, auto f) {
  double sup = -kInf;
  for (const auto& ball : w.balls()) sup = std::max(sup, f(ball.center()) + lip * ball.radius());
  return sup;
}

double spectral_spread(const HermitianOperator& a) {
  const Eigen::VectorXd ev = eigenvalues(a.matrix());
  return ev(ev.size() - 1) - ev(0);
}

const DensityState& argbest(const std::vector<DensityState>& states, auto score) {
  std::size_t best = 0;
  double best_score = -kInf;
  for (std::size_t k = 0; k < states.size(); ++k) {
    const double s = score(states[k]);
    if (s > best_score) {
      best_score = s;
      best = k;
    }
  }
  return states[best];
}

std::vector<DensityState> probe_states(const LinearSummary& summary, const Condition& w) {
  std::vector<DensityState> out = summary.extremizers;
  for (const auto& ball : w.balls()) out.push_back(ball.center());
  out.insert(out.end(), summary.samples.begin(), summary.samples.end());
  return out;
}

}  // namespace

SpreadSummary spread_summary(const HermitianOperator& a, const Condition& w, const SampleBudget& budget) {
  if (w.empty()) throw EmptySectionError("spread: empty condition");
  if (a.dim() != w.dim()) throw ValidationError("spread: operator and condition dimensions differ");

  if (a.dim() == 2) {
    // A = a0 + v.sigma gives s^2 = |v|^2 - t^2 with t = Tr(rho A) - a0, so the
    // exact range of t over each ball fixes the range of s.
    const double a0 = 0.5 * a.matrix().trace().real();
    const double v2 = std::pow(0.5 * spectral_spread(a), 2);
    double lo = kInf;
    double hi = -kInf;
    for (const auto& ball : w.balls()) {
      const auto ext = linear_extrema(a, ball, budget);
      const double tlo = ext.lo - a0;
      const double thi = ext.hi - a0;
      const double t2_max = std::max(tlo * tlo, thi * thi);
      const double t2_min = (tlo <= 0.0 && thi >= 0.0) ? 0.0 : std::min(tlo * tlo, thi * thi);
      lo = std::min(lo, std::sqrt(std::max(0.0, v2 - t2_max)));
      hi = std::max(hi, std::sqrt(std::max(0.0, v2 - t2_min)));
    }
    return {{lo, hi, Rigor::ClosedForm, budget.samples, budget.seed}, hi};
  }

  const auto summary = summarize_linear(a, w, budget);
  const auto sq = HermitianOperator(a.matrix() * a.matrix());
  double vlo = kInf;
  double vhi = -kInf;
  for (const auto& rho : probe_states(summary, w)) {
    const double v = variance(a, rho);
    vlo = std::min(vlo, v);
    vhi = std::max(vhi, v);
  }
  // |d Tr(rho A^2)| <= spread(A^2)/2 * d and |d (Tr rho A)^2| <= 2 max|l| * spread(A)/2 * d.
  const double lip = 0.5 * spectral_spread(sq) + operator_norm(a) * spectral_spread(a);
  const double cap = 0.25 * std::pow(spectral_spread(a), 2);
  const double bound = std::min(cap, center_bound(w, lip, [&](const DensityState& c) { return variance(a, c); }));
  const double hi = std::sqrt(std::max(vhi, bound));
  return {{std::sqrt(vlo), std::sqrt(vhi), Rigor::Sampled, budget.samples, budget.seed}, hi};
}

RangeInterval spread(const HermitianOperator& a, const Condition& w, const SampleBudget& budget) {
  return spread_summary(a, w, budget).range;
}

CollimationReport is_eps_sharp(const HermitianOperator& a, const Interval& interval, double eps, const Condition& w,
                               const SampleBudget& budget) {
  validate(a, interval, eps, w);
  CollimationReport r;
  r.interval = interval;
  r.eps = eps;

  const auto summary = summarize_linear(a, w, budget);
  r.a_range = summary.range;
  r.a_conservative = summary.conservative;
  const auto s = spread_summary(a, w, budget);
  r.s_range = s.range;
  r.s_conservative_hi = s.conservative_hi;

  const double a0 = interval.midpoint();
  const double half = 0.5 * interval.width();
  const double reach = r.s_conservative_hi / std::sqrt(eps);
  const double deviation = std::max(std::abs(r.a_conservative.lo - a0), std::abs(r.a_conservative.hi - a0));
  r.mean_within = deviation <= eps * half;
  r.lower_bracket = r.a_conservative.lo - reach >= interval.lo;
  r.upper_bracket = r.a_conservative.hi + reach <= interval.hi;
  r.sharp = r.mean_within && r.lower_bracket && r.upper_bracket;

  const auto probes = probe_states(summary, w);
  if (!r.mean_within)
    r.witnesses.push_back({"mean_within", argbest(probes, [&](const DensityState& x) {
                             return std::abs(x.expectation(a) - a0);
                           })});
  if (!r.lower_bracket)
    r.witnesses.push_back(
        {"lower_bracket", argbest(probes, [&](const DensityState& x) {
           return -(x.expectation(a) - std::sqrt(variance(a, x) / eps));
         })});
  if (!r.upper_bracket)
    r.witnesses.push_back(
        {"upper_bracket", argbest(probes, [&](const DensityState& x) {
           return x.expectation(a) + std::sqrt(variance(a, x) / eps);
         })});

  const auto projection = spectral_projection(a, interval);
  const auto located = summarize_linear(projection, w, budget);
  r.projection_inf = located.conservative.lo;
  r.located = r.projection_inf > 1.0 - eps;
  if (!r.located)
    r.witnesses.push_back({"located", argbest(probe_states(located, w), [&](const DensityState& x) {
                             return -x.expectation(projection);
                           })});
  return r;
}

bool is_eps_located(const HermitianOperator& a, const Interval& interval, double eps, const Condition& w,
                    const SampleBudget& budget) {
  validate(a, interval, eps, w);
  const auto projection = spectral_projection(a, interval);
  return summarize_linear(projection, w, budget).conservative.lo > 1.0 - eps;
}

CollimationReport is_strictly_eps_sharp(const HermitianOperator& a, const Interval& interval, double eps,
                                        const Condition& w, const SampleBudget& budget) {
  auto r = is_eps_sharp(a, interval, eps, w, budget);
  const auto p = spectral_projection(a, interval).matrix();
  const auto summary = summarize_linear(a, w, budget);
  auto probes = probe_states(summary, w);
  double sup = -kInf;
  std::size_t worst = 0;
  for (std::size_t k = 0; k < probes.size(); ++k) {
    const auto& rho = probes[k].matrix();
    const double d = trace_norm(ComplexMatrix(rho - p * rho * p));
    if (d > sup) {
      sup = d;
      worst = k;
    }
  }
  // rho -> rho - P rho P has trace-norm Lipschitz constant at most 2.
  const double bound = center_bound(w, 2.0, [&](const DensityState& c) {
    return trace_norm(ComplexMatrix(c.matrix() - p * c.matrix() * p));
  });
  sup = std::max(sup, std::min(2.0, bound));
  r.disturbance_sup = sup;
  const bool disturbance_ok = sup < eps;
  r.strict = r.sharp && disturbance_ok;
  if (!disturbance_ok) r.witnesses.push_back({"disturbance", probes[worst]});
  return r;
}

HeisenbergRecord heisenberg_check(const HermitianOperator& a, const HermitianOperator& b, const Interval& ia,
                                  const Interval& ib, double eps, const Condition& w, const SampleBudget& budget) {
  if (a.dim() != b.dim()) throw ValidationError("heisenberg_check: operator dimensions differ");
  HeisenbergRecord h;
  h.a_report = is_eps_sharp(a, ia, eps, w, budget);
  h.b_report = is_eps_sharp(b, ib, eps, w, budget);
  h.both_sharp = h.a_report.sharp && h.b_report.sharp;

  const auto c = commutator_hermitian(a, b);
  const auto summary = summarize_linear(c, w, budget);
  h.commutator_range = summary.range;
  const auto& cons = summary.conservative;
  h.commutator_inf_abs = (cons.lo <= 0.0 && cons.hi >= 0.0) ? 0.0 : std::min(std::abs(cons.lo), std::abs(cons.hi));
  h.lhs = ia.width() * ib.width();
  h.rhs = 2.0 * h.commutator_inf_abs / eps;
  h.satisfied = h.lhs + 1e-12 * std::max(1.0, h.rhs) >= h.rhs;
  return h;
}

}  // namespace qrlab
