#include "qrlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qrlab/error.hpp"
#include "qrlab/parallel.hpp"
#include "qrlab/random.hpp"

namespace qrlab {

namespace {

void require_unit(const Vec3& u, const char* what) {
  const double n = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
  if (!(std::abs(n - 1.0) <= 1e-10)) {
    std::ostringstream os;
    os << what << ": direction must be a unit vector (norm " << n << ")";
    throw ValidationError(os.str());
  }
}

void validate_ensemble(const EnsembleSpec& spec, const char* what) {
  if (spec.count == 0) throw ValidationError(std::string(what) + ": count must be >= 1");
  if (!(spec.eps >= 0.0) || !std::isfinite(spec.eps)) throw ValidationError(std::string(what) + ": eps must be >= 0");
  if (!(spec.ontic_fraction > 0.0 && spec.ontic_fraction < 1.0))
    throw ValidationError(std::string(what) + ": ontic fraction must lie in (0, 1)");
  if (spec.range_samples == 0) throw ValidationError(std::string(what) + ": range samples must be >= 1");
}

std::vector<DensityState> epistemic_samples(const EnsembleSpec& spec) {
  if (spec.eps == 0.0) return std::vector<DensityState>(spec.count, spec.rho0);
  return sample_states(Condition::ball(spec.rho0, spec.eps), spec.count, spec.seed);
}

double conservative_inf(const HermitianOperator& p, const Condition& w, const SampleBudget& budget) {
  return summarize_linear(p, w, budget).conservative.lo;
}

}  // namespace

HermitianOperator spin_correlation(const Vec3& left, const Vec3& right) {
  require_unit(left, "spin_correlation");
  require_unit(right, "spin_correlation");
  return HermitianOperator(tensor(spin_along(left).matrix(), spin_along(right).matrix()));
}

DensityState singlet() {
  ComplexVector psi = ComplexVector::Zero(4);
  psi(1) = 1.0 / std::sqrt(2.0);
  psi(2) = -1.0 / std::sqrt(2.0);
  return DensityState::pure(psi);
}

Vec3 xz_direction(double theta) { return {std::sin(theta), 0.0, std::cos(theta)}; }

BellReport bell_bohm(const Vec3& left, const Vec3& right, const EnsembleSpec& spec) {
  validate_ensemble(spec, "bell_bohm");
  if (spec.rho0.dim() != 4) throw ValidationError("bell_bohm: the pair state must have dimension 4");
  BellReport r;
  r.correlation = spin_correlation(left, right);
  r.target = spec.rho0.expectation(r.correlation);
  const auto states = epistemic_samples(spec);
  const double delta = spec.ontic_fraction * spec.eps;
  r.values.assign(states.size(), 0.0);
  std::vector<double> gaps(states.size(), 0.0);

  parallel_for(states.size(), [&](std::size_t n) {
    const double exact = states[n].expectation(r.correlation);
    if (delta == 0.0) {
      r.values[n] = exact;
      return;
    }
    auto rng = substream(spec.seed, Stream::BellPairs, n);
    const SampleBudget budget{spec.range_samples, rng(), 0};
    const auto range = summarize_linear(r.correlation, Condition::ball(states[n], delta), budget).range;
    r.values[n] = range.midpoint();
    gaps[n] = std::abs(r.values[n] - exact) / delta;
  });

  double sum = 0.0;
  for (double v : r.values) sum += v;
  r.mean = sum / static_cast<double>(r.values.size());
  r.max_pair_gap = *std::max_element(gaps.begin(), gaps.end());
  r.pairs_within = delta == 0.0 || r.max_pair_gap < 1.0;
  r.bound = spec.eps + delta;
  r.pass = std::abs(r.mean - r.target) <= r.bound;
  return r;
}

ChshReport chsh(const Vec3& a, const Vec3& a2, const Vec3& b, const Vec3& b2, const EnsembleSpec& spec) {
  ChshReport r;
  r.correlations = {bell_bohm(a, b, spec).mean, bell_bohm(a, b2, spec).mean, bell_bohm(a2, b, spec).mean,
                    bell_bohm(a2, b2, spec).mean};
  const auto& e = r.correlations;
  r.s = std::abs(e[0] - e[1]) + std::abs(e[2] + e[3]);
  return r;
}

DichotomicReport dichotomic_ensemble(const HermitianOperator& projection, const EnsembleSpec& spec) {
  validate_ensemble(spec, "dichotomic_ensemble");
  if (projection.dim() != spec.rho0.dim()) throw ValidationError("dichotomic_ensemble: dimension mismatch");
  if (!is_projection(projection)) throw ValidationError("dichotomic_ensemble: operator is not a projection");
  DichotomicReport r;
  const auto states = epistemic_samples(spec);
  r.outcomes.assign(states.size(), 0);
  parallel_for(states.size(), [&](std::size_t n) {
    auto rng = substream(spec.seed, Stream::Dichotomic, n);
    r.outcomes[n] = uniform01(rng) < states[n].expectation(projection) ? 1 : 0;
  });
  std::size_t ones = 0;
  for (int o : r.outcomes) ones += static_cast<std::size_t>(o);
  const double count = static_cast<double>(r.outcomes.size());
  r.frequency = static_cast<double>(ones) / count;
  r.target = spec.rho0.expectation(projection);
  const double p = std::clamp(r.target, 0.0, 1.0);
  r.bound = spec.eps + 3.0 * std::sqrt(p * (1.0 - p) / count);
  r.pass = std::abs(r.frequency - r.target) <= r.bound;
  return r;
}

DensityState collapse(const DensityState& rho, const HermitianOperator& projection) {
  if (rho.dim() != projection.dim()) throw ValidationError("collapse: dimension mismatch");
  const double prob = rho.expectation(projection);
  if (!(prob > 1e-9)) {
    std::ostringstream os;
    os << "collapse: outcome probability Tr(P rho) = " << prob << " is not positive";
    throw ValidationError(os.str());
  }
  const auto& p = projection.matrix();
  return DensityState(ComplexMatrix(p * rho.matrix() * p / prob));
}

LuedersReport lueders_experiment(const HermitianOperator& a, const Interval& ia, const HermitianOperator& b,
                                 const DensityState& rho0, double delta, const Condition& u, double eps, double k,
                                 const SampleBudget& budget) {
  if (a.dim() != b.dim() || a.dim() != rho0.dim()) throw ValidationError("lueders_experiment: dimension mismatch");
  if (!(delta > 0.0)) throw ValidationError("lueders_experiment: delta must be positive");
  if (!(k > 0.0) || !std::isfinite(k)) throw ValidationError("lueders_experiment: K must be positive");
  auto collimation = is_strictly_eps_sharp(a, ia, eps, u, budget);
  if (!collimation.strict)
    throw ValidationError("lueders_experiment: (A, I_a) is not strictly eps-sharp collimated on U");
  const auto projection = spectral_projection(a, ia);
  auto collapsed = collapse(rho0, projection);
  auto cover = intersection_cover(u, Condition::ball(rho0, delta));
  if (cover.empty()) throw EmptySectionError("lueders_experiment: U and W do not intersect");

  const double target = collapsed.expectation(b);
  const auto range = summarize_linear(b, cover, budget).conservative;
  const double deviation = std::max(std::abs(range.lo - target), std::abs(range.hi - target));
  const double bound = k * (delta + 2.0 * eps);
  return {std::move(collapsed), target, range, deviation, bound, deviation <= bound, std::move(collimation),
          std::move(cover)};
}

SlitReport double_slit_location(const HermitianOperator& z, const Interval& plus, const Interval& minus,
                                const Condition& w, double eps, const SampleBudget& budget) {
  make_interval(plus.lo, plus.hi);
  make_interval(minus.lo, minus.hi);
  if (!(plus.hi < minus.lo || minus.hi < plus.lo)) throw ValidationError("double_slit_location: slits overlap");
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("double_slit_location: eps must lie in (0, 1)");
  if (w.empty()) throw EmptySectionError("double_slit_location: empty condition");
  if (z.dim() != w.dim()) throw ValidationError("double_slit_location: dimension mismatch");

  const auto p_plus = spectral_projection(z, plus);
  const auto p_minus = spectral_projection(z, minus);
  const auto p_union = p_plus + p_minus;

  SlitReport r;
  const auto plus_summary = summarize_linear(p_plus, w, budget);
  const auto minus_summary = summarize_linear(p_minus, w, budget);
  r.plus_range = plus_summary.conservative;
  r.minus_range = minus_summary.conservative;
  r.inf_plus = plus_summary.conservative.lo;
  r.inf_minus = minus_summary.conservative.lo;
  r.inf_union = conservative_inf(p_union, w, budget);
  r.located_plus = r.inf_plus > 1.0 - eps;
  r.located_minus = r.inf_minus > 1.0 - eps;
  r.located_union = r.inf_union > 1.0 - eps;
  r.z_range = summarize_linear(z, w, budget).range;
  return r;
}

ComplexVector gaussian_superposition(Eigen::Index points, double lo, double hi, const std::vector<double>& centers,
                                     double width) {
  if (points < 2 || !(hi > lo)) throw ValidationError("gaussian_superposition: need >= 2 points and hi > lo");
  if (centers.empty() || !(width > 0.0)) throw ValidationError("gaussian_superposition: need centers and width > 0");
  ComplexVector psi = ComplexVector::Zero(points);
  const double step = (hi - lo) / static_cast<double>(points - 1);
  for (Eigen::Index k = 0; k < points; ++k) {
    const double x = lo + step * static_cast<double>(k);
    for (double c : centers) psi(k) += std::exp(-(x - c) * (x - c) / (2.0 * width * width));
  }
  const double norm = psi.norm();
  if (norm == 0.0) throw NumericError("gaussian_superposition: wave function vanishes on the grid");
  return psi / norm;
}

}  // namespace qrlab
