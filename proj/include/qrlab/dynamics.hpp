#pragma once

#include <string>
#include <vector>

#include "qrlab/qr_number.hpp"

namespace qrlab {

enum class Potential { Free, Harmonic, Quartic };

/// Truncated oscillator model, hbar = m = omega = 1.
struct ModelSpec {
  Eigen::Index dim = 40;
  Potential potential = Potential::Harmonic;
  double lambda = 0.0;  // quartic coupling, V = q^2/2 + lambda q^4
};

/// Ladder-built operators. H = (a^dagger a + 1/2) + (V(Q) - Q^2/2), which makes
/// dQ/dt = P hold exactly in the truncation and, for the harmonic model,
/// dP/dt = -Q as well.
struct Model {
  ModelSpec spec;
  HermitianOperator q;
  HermitianOperator p;
  HermitianOperator h;
};

Model build_model(const ModelSpec& spec);

Potential parse_potential(const std::string& name);
std::string to_string(Potential p);

/// Classical h(q, p) = p^2/2 + V(q).
double classical_energy(const ModelSpec& spec, double q, double p);

/// Ascending times 0, step, 2 step, ..., t_end (step <= 1e-2).
std::vector<double> make_time_grid(double t_end, double step);

/// Coherent state |alpha>, alpha = (q0 + i p0)/sqrt(2), truncated and renormalized.
ComplexVector coherent_state(Eigen::Index dim, double q0, double p0);

struct Trajectory {
  std::vector<double> q;
  std::vector<double> p;
};

/// Classical Hamilton flow by fixed-step RK4 (internal substeps <= 1e-3).
Trajectory hamilton_trajectory(const ModelSpec& spec, double q0, double p0, const std::vector<double>& times);

struct QuantumTrajectory {
  Trajectory phase;
  /// Population of the top ceil(dim/10) Fock levels at each time.
  std::vector<double> top_population;
};

/// Exact evolution rho(t) = e^{-iHt} rho e^{iHt} in the eigenbasis of H.
QuantumTrajectory heisenberg_trajectory(const Model& model, const DensityState& rho, const std::vector<double>& times);

/// rho(t) itself (for diagnostics).
DensityState evolve_state(const Model& model, const DensityState& rho, double t);

inline constexpr double kTruncationThreshold = 1e-6;

struct PhaseSection {
  std::vector<double> times;
  std::vector<Trajectory> samples;
  /// Max top-level population over the run, per sample (quantum side only).
  std::vector<double> truncation;
  double truncation_max = 0.0;
  bool truncation_warning = false;
};

/// Sampled states of W used by both evolutions (support restricted to the
/// lower 3/4 of the levels so that samples start away from the truncation edge).
std::vector<DensityState> dynamics_samples(const Model& model, const Condition& w, const SampleBudget& budget);

PhaseSection qr_hamilton_evolve(const Model& model, const Condition& w, const std::vector<double>& times,
                                const SampleBudget& budget);
PhaseSection heisenberg_average_evolve(const Model& model, const Condition& w, const std::vector<double>& times,
                                       const SampleBudget& budget);

inline constexpr double kEvolutionTolerance = 1e-6;

struct EvolutionComparison {
  double sup_dev = 0.0;
  std::vector<double> dev_curve;
  bool linear_equal = false;
};

EvolutionComparison compare_evolutions(const PhaseSection& a, const PhaseSection& b);

}  // namespace qrlab
