#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace qrlab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Vec3 = std::array<double, 3>;

inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kDegeneracyGap = 1e-9;
inline constexpr double kUnitaryTolerance = 1e-10;

/// Closed real interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  double midpoint() const { return 0.5 * (lo + hi); }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool contains(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }
  bool operator==(const Interval&) const = default;
};

/// Throws ValidationError unless lo <= hi and both are finite.
Interval make_interval(double lo, double hi);

/// Self-adjoint finite-dimensional operator. The stored matrix is exactly
/// Hermitian: inputs within tolerance are symmetrized on construction.
class HermitianOperator {
 public:
  explicit HermitianOperator(const ComplexMatrix& m);

  static HermitianOperator identity(Eigen::Index dim);
  static HermitianOperator zero(Eigen::Index dim);

  const ComplexMatrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

  /// Re Tr(rho A).
  double expectation(const ComplexMatrix& rho) const;

  HermitianOperator operator+(const HermitianOperator& o) const;
  HermitianOperator operator-(const HermitianOperator& o) const;
  HermitianOperator operator*(double s) const;

 private:
  ComplexMatrix m_;
};

/// Eigenvalues grouped into eigenspaces (gap < kDegeneracyGap merges).
struct SpectralDecomposition {
  std::vector<double> eigenvalues;             // ascending, one per eigenspace
  std::vector<HermitianOperator> projectors;   // orthogonal projections
  Eigen::VectorXd raw_eigenvalues;             // ascending, with multiplicity
  ComplexMatrix eigenvectors;                  // columns match raw_eigenvalues

  ComplexMatrix reconstruct() const;
};

SpectralDecomposition eig_decompose(const HermitianOperator& a);

/// Ascending eigenvalues with multiplicity; cheaper than eig_decompose.
Eigen::VectorXd eigenvalues(const ComplexMatrix& hermitian);

/// Sum of the eigenspace projectors whose eigenvalue lies in the closed interval.
HermitianOperator spectral_projection(const HermitianOperator& a, const Interval& interval);

/// C = -i[A, B], which is Hermitian whenever A and B are.
HermitianOperator commutator_hermitian(const HermitianOperator& a, const HermitianOperator& b);

/// Kronecker product.
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);

/// Tr|T|, the sum of singular values.
double trace_norm(const ComplexMatrix& t);
/// Tr|A| for Hermitian A: sum of |eigenvalues|.
double trace_norm(const HermitianOperator& a);

/// Largest |eigenvalue|.
double operator_norm(const HermitianOperator& a);

bool is_unitary(const ComplexMatrix& u, double tol = kUnitaryTolerance);
bool is_projection(const HermitianOperator& p, double tol = 1e-10);

HermitianOperator sigma_x();
HermitianOperator sigma_y();
HermitianOperator sigma_z();
/// u . sigma for a 3-vector u.
HermitianOperator spin_along(const Vec3& u);

/// Truncated harmonic-oscillator ladder operator a on span{|0>,...,|dim-1>}.
ComplexMatrix annihilation(Eigen::Index dim);
/// Q = (a + a^dagger)/sqrt(2), hbar = m = omega = 1.
HermitianOperator ladder_position(Eigen::Index dim);
/// P = i(a^dagger - a)/sqrt(2).
HermitianOperator ladder_momentum(Eigen::Index dim);
/// Diagonal position operator on `points` equally spaced grid points of [lo, hi].
HermitianOperator grid_position(Eigen::Index points, double lo, double hi);

}  // namespace qrlab
