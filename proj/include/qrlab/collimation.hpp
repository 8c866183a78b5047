#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qrlab/qr_number.hpp"

namespace qrlab {

/// Range of rho -> sqrt(Tr rho A^2 - (Tr rho A)^2) over W (tiny negative
/// variances clamp to 0). Exact for qubits.
struct SpreadSummary {
  RangeInterval range;
  /// Sound upper end: variance at each ball center plus its Lipschitz
  /// constant times the radius (equal to the range's upper end on qubits).
  double conservative_hi = 0.0;
};

SpreadSummary spread_summary(const HermitianOperator& a, const Condition& w, const SampleBudget& budget);
RangeInterval spread(const HermitianOperator& a, const Condition& w, const SampleBudget& budget);

struct Witness {
  std::string clause;
  DensityState state;
};

struct CollimationReport {
  RangeInterval a_range;
  /// Range used by the "for all rho in W" clauses.
  Interval a_conservative;
  RangeInterval s_range;
  double s_conservative_hi = 0.0;
  Interval interval;
  double eps = 0.0;

  bool mean_within = false;    // |a - a0| <= eps |I| / 2
  bool lower_bracket = false;  // a - s / sqrt(eps) >= a0 - |I| / 2
  bool upper_bracket = false;  // a + s / sqrt(eps) <= a0 + |I| / 2
  bool sharp = false;

  /// Conservative infimum of Tr(rho P) with P the spectral projection on I.
  double projection_inf = 0.0;
  bool located = false;

  /// Conservative supremum of Tr|rho - P rho P| (only when strictness is checked).
  std::optional<double> disturbance_sup;
  bool strict = false;

  std::vector<Witness> witnesses;
};

/// Sharp collimation verdict (plus the location verdict, which it implies).
CollimationReport is_eps_sharp(const HermitianOperator& a, const Interval& interval, double eps, const Condition& w,
                               const SampleBudget& budget);

bool is_eps_located(const HermitianOperator& a, const Interval& interval, double eps, const Condition& w,
                    const SampleBudget& budget);

/// Sharp verdict and sup Tr|rho - P rho P| < eps.
CollimationReport is_strictly_eps_sharp(const HermitianOperator& a, const Interval& interval, double eps,
                                        const Condition& w, const SampleBudget& budget);

struct HeisenbergRecord {
  bool both_sharp = false;
  double lhs = 0.0;  // |I_a| |I_b|
  double rhs = 0.0;  // 2 inf |c| / eps, c = Tr(rho (-i[A, B]))
  double commutator_inf_abs = 0.0;
  RangeInterval commutator_range;
  bool satisfied = false;
  CollimationReport a_report;
  CollimationReport b_report;
};

HeisenbergRecord heisenberg_check(const HermitianOperator& a, const HermitianOperator& b, const Interval& ia,
                                  const Interval& ib, double eps, const Condition& w, const SampleBudget& budget);

}  // namespace qrlab
