#include "qrlab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qrlab/error.hpp"
#include "qrlab/parallel.hpp"

namespace qrlab {

namespace {

constexpr double kMaxGridStep = 1e-2;
constexpr double kMaxSubstep = 1e-3;

double force(const ModelSpec& spec, double q) {
  switch (spec.potential) {
    case Potential::Free:
      return 0.0;
    case Potential::Harmonic:
      return -q;
    case Potential::Quartic:
      return -q - 4.0 * spec.lambda * q * q * q;
  }
  return 0.0;
}

void validate_times(const std::vector<double>& times) {
  if (times.empty()) throw ValidationError("time grid is empty");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!std::isfinite(times[k])) throw ValidationError("time grid contains a non-finite value");
    if (k == 0) continue;
    const double step = times[k] - times[k - 1];
    if (!(step > 0.0)) throw ValidationError("time grid must be strictly ascending");
    if (step > kMaxGridStep * (1.0 + 1e-9)) {
      std::ostringstream os;
      os << "time grid step " << step << " exceeds " << kMaxGridStep;
      throw ValidationError(os.str());
    }
  }
}

// Heisenberg-picture data in the eigenbasis of H.
struct Eigenframe {
  Eigen::VectorXd energies;
  ComplexMatrix vectors;
};

Eigenframe eigenframe(const Model& model) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(model.h.matrix());
  if (solver.info() != Eigen::Success) throw NumericError("dynamics: eigensolver did not converge for H");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

HermitianOperator top_levels(Eigen::Index dim) {
  const Eigen::Index count = (dim + 9) / 10;
  ComplexMatrix pi = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index k = dim - count; k < dim; ++k) pi(k, k) = 1.0;
  return HermitianOperator(pi);
}

}  // namespace

Potential parse_potential(const std::string& name) {
  if (name == "free") return Potential::Free;
  if (name == "harmonic") return Potential::Harmonic;
  if (name == "quartic") return Potential::Quartic;
  throw ValidationError("unknown potential '" + name + "' (expected free, harmonic, quartic)");
}

std::string to_string(Potential p) {
  switch (p) {
    case Potential::Free: return "free";
    case Potential::Harmonic: return "harmonic";
    case Potential::Quartic: return "quartic";
  }
  return "?";
}

Model build_model(const ModelSpec& spec) {
  if (spec.dim < 16) throw ValidationError("dynamics: truncation dimension must be >= 16");
  if (spec.potential == Potential::Quartic && !(spec.lambda >= 0.0 && std::isfinite(spec.lambda)))
    throw ValidationError("dynamics: quartic coupling must be finite and >= 0");
  const Eigen::Index n = spec.dim;
  const ComplexMatrix a = annihilation(n);
  const auto q = ladder_position(n);
  const auto p = ladder_momentum(n);
  const ComplexMatrix q2 = q.matrix() * q.matrix();
  ComplexMatrix h = a.adjoint() * a + 0.5 * ComplexMatrix::Identity(n, n);
  switch (spec.potential) {
    case Potential::Free:
      h -= 0.5 * q2;
      break;
    case Potential::Harmonic:
      break;
    case Potential::Quartic:
      h += spec.lambda * q2 * q2;
      break;
  }
  return {spec, q, p, HermitianOperator(h)};
}

double classical_energy(const ModelSpec& spec, double q, double p) {
  double v = 0.0;
  if (spec.potential == Potential::Harmonic) v = 0.5 * q * q;
  if (spec.potential == Potential::Quartic) v = 0.5 * q * q + spec.lambda * q * q * q * q;
  return 0.5 * p * p + v;
}

std::vector<double> make_time_grid(double t_end, double step) {
  if (!(step > 0.0) || step > kMaxGridStep * (1.0 + 1e-9))
    throw ValidationError("time grid step must lie in (0, 1e-2]");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ValidationError("time grid end must be positive");
  const auto n = static_cast<std::size_t>(std::ceil(t_end / step - 1e-9));
  std::vector<double> out(n + 1);
  for (std::size_t k = 0; k <= n; ++k) out[k] = std::min(t_end, step * static_cast<double>(k));
  return out;
}

ComplexVector coherent_state(Eigen::Index dim, double q0, double p0) {
  if (dim < 2) throw ValidationError("coherent_state: dim must be >= 2");
  const Complex alpha = Complex(q0, p0) / std::sqrt(2.0);
  ComplexVector v(dim);
  v(0) = 1.0;
  for (Eigen::Index n = 1; n < dim; ++n) v(n) = v(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  return v / v.norm();
}

Trajectory hamilton_trajectory(const ModelSpec& spec, double q0, double p0, const std::vector<double>& times) {
  validate_times(times);
  Trajectory out;
  out.q.reserve(times.size());
  out.p.reserve(times.size());
  double q = q0;
  double p = p0;
  out.q.push_back(q);
  out.p.push_back(p);
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double span = times[k] - times[k - 1];
    const auto steps = static_cast<int>(std::ceil(span / kMaxSubstep - 1e-9));
    const double h = span / steps;
    for (int s = 0; s < steps; ++s) {
      const double k1q = p, k1p = force(spec, q);
      const double k2q = p + 0.5 * h * k1p, k2p = force(spec, q + 0.5 * h * k1q);
      const double k3q = p + 0.5 * h * k2p, k3p = force(spec, q + 0.5 * h * k2q);
      const double k4q = p + h * k3p, k4p = force(spec, q + h * k3q);
      q += h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
      p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    }
    if (!std::isfinite(q) || !std::isfinite(p)) {
      std::ostringstream os;
      os << "hamilton_trajectory: non-finite state at t = " << times[k];
      throw NumericError(os.str());
    }
    out.q.push_back(q);
    out.p.push_back(p);
  }
  return out;
}

QuantumTrajectory heisenberg_trajectory(const Model& model, const DensityState& rho, const std::vector<double>& times) {
  validate_times(times);
  if (rho.dim() != model.spec.dim) throw ValidationError("heisenberg_trajectory: state dimension differs from model");
  const auto frame = eigenframe(model);
  const ComplexMatrix& v = frame.vectors;
  const ComplexMatrix rt = v.adjoint() * rho.matrix() * v;
  // Tr(rho(t) X) = sum_jk rt_jk e^{-i(E_j - E_k)t} Xt_kj
  auto weights = [&](const HermitianOperator& x) -> ComplexMatrix {
    const ComplexMatrix xt = v.adjoint() * x.matrix() * v;
    return rt.cwiseProduct(xt.transpose());
  };
  const ComplexMatrix wq = weights(model.q);
  const ComplexMatrix wp = weights(model.p);
  const HermitianOperator top = top_levels(model.spec.dim);
  const ComplexMatrix wtop = weights(top);
  QuantumTrajectory out;
  for (double t : times) {
    if (t == 0.0) {
      // rho(0) = rho; skip the round trip through the eigenframe.
      out.phase.q.push_back(rho.expectation(model.q));
      out.phase.p.push_back(rho.expectation(model.p));
      out.top_population.push_back(rho.expectation(top));
      continue;
    }
    ComplexVector phase(frame.energies.size());
    for (Eigen::Index j = 0; j < phase.size(); ++j) phase(j) = std::polar(1.0, -frame.energies(j) * t);
    auto value = [&](const ComplexMatrix& w) {
      return (phase.transpose() * w * phase.conjugate()).value().real();
    };
    out.phase.q.push_back(value(wq));
    out.phase.p.push_back(value(wp));
    out.top_population.push_back(value(wtop));
  }
  return out;
}

DensityState evolve_state(const Model& model, const DensityState& rho, double t) {
  const auto frame = eigenframe(model);
  ComplexVector phase(frame.energies.size());
  for (Eigen::Index j = 0; j < phase.size(); ++j) phase(j) = std::polar(1.0, -frame.energies(j) * t);
  const ComplexMatrix u = frame.vectors * phase.asDiagonal() * frame.vectors.adjoint();
  return DensityState(u * rho.matrix() * u.adjoint());
}

std::vector<DensityState> dynamics_samples(const Model& model, const Condition& w, const SampleBudget& budget) {
  if (w.dim() != model.spec.dim) throw ValidationError("dynamics: condition dimension differs from model");
  SamplerOptions options;
  options.support_dim = std::max<Eigen::Index>(1, 3 * model.spec.dim / 4);
  return sample_states(w, budget.samples, budget.seed, options);
}

PhaseSection qr_hamilton_evolve(const Model& model, const Condition& w, const std::vector<double>& times,
                                const SampleBudget& budget) {
  validate_times(times);
  const auto states = dynamics_samples(model, w, budget);
  PhaseSection out;
  out.times = times;
  out.samples.resize(states.size());
  parallel_for(states.size(), [&](std::size_t i) {
    out.samples[i] =
        hamilton_trajectory(model.spec, states[i].expectation(model.q), states[i].expectation(model.p), times);
  });
  return out;
}

PhaseSection heisenberg_average_evolve(const Model& model, const Condition& w, const std::vector<double>& times,
                                       const SampleBudget& budget) {
  validate_times(times);
  const auto states = dynamics_samples(model, w, budget);
  PhaseSection out;
  out.times = times;
  out.samples.resize(states.size());
  out.truncation.resize(states.size());
  parallel_for(states.size(), [&](std::size_t i) {
    auto traj = heisenberg_trajectory(model, states[i], times);
    out.truncation[i] = *std::max_element(traj.top_population.begin(), traj.top_population.end());
    out.samples[i] = std::move(traj.phase);
  });
  for (double x : out.truncation) out.truncation_max = std::max(out.truncation_max, x);
  out.truncation_warning = out.truncation_max > kTruncationThreshold;
  return out;
}

EvolutionComparison compare_evolutions(const PhaseSection& a, const PhaseSection& b) {
  if (a.times != b.times) throw ValidationError("compare_evolutions: time grids differ");
  if (a.samples.size() != b.samples.size()) throw ValidationError("compare_evolutions: sample counts differ");
  EvolutionComparison out;
  out.dev_curve.assign(a.times.size(), 0.0);
  for (std::size_t s = 0; s < a.samples.size(); ++s) {
    const auto& x = a.samples[s];
    const auto& y = b.samples[s];
    if (x.q.size() != a.times.size() || y.q.size() != a.times.size())
      throw ValidationError("compare_evolutions: trajectory length differs from grid");
    for (std::size_t k = 0; k < a.times.size(); ++k) {
      const double d = std::max(std::abs(x.q[k] - y.q[k]), std::abs(x.p[k] - y.p[k]));
      out.dev_curve[k] = std::max(out.dev_curve[k], d);
    }
  }
  for (double d : out.dev_curve) out.sup_dev = std::max(out.sup_dev, d);
  out.linear_equal = out.sup_dev <= kEvolutionTolerance;
  return out;
}

}  // namespace qrlab
