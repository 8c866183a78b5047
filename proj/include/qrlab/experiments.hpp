#pragma once

#include <array>
#include <optional>
#include <vector>

#include "qrlab/collimation.hpp"
#include "qrlab/qr_number.hpp"

namespace qrlab {

/// Epistemic condition nu(rho0; eps) with ontic radii delta_n = fraction * eps.
struct EnsembleSpec {
  DensityState rho0;
  double eps = 0.01;
  std::size_t count = 1000;
  double ontic_fraction = 0.1;
  std::uint64_t seed = 0;
  /// Samples per ontic ball when ranging the correlation.
  std::size_t range_samples = 8;
};

struct BellReport {
  HermitianOperator correlation = HermitianOperator::zero(4);
  std::vector<double> values;  // c_n, one per pair
  double mean = 0.0;
  double target = 0.0;         // Tr(rho0 C)
  double bound = 0.0;          // eps + max delta_n
  double max_pair_gap = 0.0;   // max_n |c_n - Tr(rho_n C)| / delta_n
  bool pairs_within = false;   // every |c_n - Tr(rho_n C)| < delta_n
  bool pass = false;           // |mean - target| <= bound
};

/// Two-qubit spin correlation C = (sigma.u_L) x (sigma.u_R).
HermitianOperator spin_correlation(const Vec3& left, const Vec3& right);

/// Singlet (|01> - |10>)/sqrt(2).
DensityState singlet();

BellReport bell_bohm(const Vec3& left, const Vec3& right, const EnsembleSpec& spec);

/// Unit vector at angle theta (radians) from z toward x.
Vec3 xz_direction(double theta);

struct ChshReport {
  std::array<double, 4> correlations{};  // E(a,b), E(a,b'), E(a',b), E(a',b')
  double s = 0.0;
};

ChshReport chsh(const Vec3& a, const Vec3& a2, const Vec3& b, const Vec3& b2, const EnsembleSpec& spec);

struct DichotomicReport {
  std::vector<int> outcomes;
  double frequency = 0.0;
  double target = 0.0;  // Tr(rho0 P)
  double bound = 0.0;   // delta + 3 sqrt(p(1-p)/N)
  bool pass = false;
};

/// Frequency of outcome 1 when run n registers 1 iff u_n < Tr(rho_n P),
/// rho_n sampled in nu(rho0; eps) and u_n uniform.
DichotomicReport dichotomic_ensemble(const HermitianOperator& projection, const EnsembleSpec& spec);

/// P rho P / Tr(P rho). Throws ValidationError when Tr(P rho) <= 1e-9.
DensityState collapse(const DensityState& rho, const HermitianOperator& projection);

struct LuedersReport {
  DensityState collapsed;
  double target = 0.0;  // Tr(rho0' B)
  Interval b_range;     // conservative range of b over the cover of U ∩ W
  double deviation = 0.0;
  double bound = 0.0;   // K (delta + 2 eps)
  bool pass = false;
  CollimationReport collimation;
  Condition cover;
};

/// W = nu(rho0; delta). Requires strict eps-sharp collimation of (A, I_a) on U
/// and U ∩ W nonempty.
LuedersReport lueders_experiment(const HermitianOperator& a, const Interval& ia, const HermitianOperator& b,
                                 const DensityState& rho0, double delta, const Condition& u, double eps, double k,
                                 const SampleBudget& budget);

struct SlitReport {
  bool located_union = false;
  bool located_plus = false;
  bool located_minus = false;
  double inf_union = 0.0;
  double inf_plus = 0.0;
  double inf_minus = 0.0;
  Interval plus_range;
  Interval minus_range;
  RangeInterval z_range;
};

SlitReport double_slit_location(const HermitianOperator& z, const Interval& plus, const Interval& minus,
                                const Condition& w, double eps, const SampleBudget& budget);

/// Normalized sum of Gaussians exp(-(x - c)^2 / (2 width^2)) sampled on the grid.
ComplexVector gaussian_superposition(Eigen::Index points, double lo, double hi, const std::vector<double>& centers,
                                     double width);

}  // namespace qrlab
