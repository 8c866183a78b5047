#include "qrlab/operator_core.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "qrlab/error.hpp"

namespace qrlab {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << ": expected a nonempty square matrix, got " << m.rows() << "x" << m.cols();
    throw ValidationError(os.str());
  }
}

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a << " vs " << b << ")";
    throw ValidationError(os.str());
  }
}

}  // namespace

Interval make_interval(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw ValidationError("interval endpoints must be finite");
  if (lo > hi) throw ValidationError("interval requires lo <= hi");
  return Interval{lo, hi};
}

HermitianOperator::HermitianOperator(const ComplexMatrix& m) {
  require_square(m, "HermitianOperator");
  if (!m.allFinite()) throw ValidationError("HermitianOperator: non-finite entry");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (asym > kHermitianTolerance * scale) {
    std::ostringstream os;
    os << "HermitianOperator: matrix is not Hermitian (max |A - A^dagger| = " << asym << ")";
    throw ValidationError(os.str());
  }
  m_ = 0.5 * (m + m.adjoint());
}

HermitianOperator HermitianOperator::identity(Eigen::Index dim) {
  return HermitianOperator(ComplexMatrix::Identity(dim, dim));
}

HermitianOperator HermitianOperator::zero(Eigen::Index dim) {
  return HermitianOperator(ComplexMatrix::Zero(dim, dim));
}

double HermitianOperator::expectation(const ComplexMatrix& rho) const {
  require_same_dim(rho.rows(), dim(), "expectation");
  // Tr(rho A) = sum_ij rho_ij A_ji
  return (rho.array() * m_.transpose().array()).sum().real();
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& o) const {
  require_same_dim(dim(), o.dim(), "operator+");
  return HermitianOperator(m_ + o.m_);
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& o) const {
  require_same_dim(dim(), o.dim(), "operator-");
  return HermitianOperator(m_ - o.m_);
}

HermitianOperator HermitianOperator::operator*(double s) const { return HermitianOperator(m_ * s); }

ComplexMatrix SpectralDecomposition::reconstruct() const {
  ComplexMatrix out = ComplexMatrix::Zero(eigenvectors.rows(), eigenvectors.rows());
  for (std::size_t k = 0; k < eigenvalues.size(); ++k) out += eigenvalues[k] * projectors[k].matrix();
  return out;
}

SpectralDecomposition eig_decompose(const HermitianOperator& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a.matrix());
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "eig_decompose: eigensolver did not converge within "
       << Eigen::SelfAdjointEigenSolver<ComplexMatrix>::m_maxIterations * a.dim()
       << " iterations (dim " << a.dim() << ")";
    throw NumericError(os.str());
  }
  SpectralDecomposition out;
  out.raw_eigenvalues = solver.eigenvalues();
  out.eigenvectors = solver.eigenvectors();

  const Eigen::Index n = a.dim();
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index end = start + 1;
    while (end < n && out.raw_eigenvalues(end) - out.raw_eigenvalues(end - 1) < kDegeneracyGap) ++end;
    const auto block = out.eigenvectors.middleCols(start, end - start);
    out.eigenvalues.push_back(out.raw_eigenvalues.segment(start, end - start).mean());
    out.projectors.emplace_back(block * block.adjoint());
    start = end;
  }
  return out;
}

Eigen::VectorXd eigenvalues(const ComplexMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("eigenvalues: eigensolver did not converge");
  return solver.eigenvalues();
}

HermitianOperator spectral_projection(const HermitianOperator& a, const Interval& interval) {
  if (!std::isfinite(interval.lo) || !std::isfinite(interval.hi) || interval.lo > interval.hi)
    throw ValidationError("spectral_projection: interval must be nonempty with finite endpoints");
  const auto spec = eig_decompose(a);
  ComplexMatrix p = ComplexMatrix::Zero(a.dim(), a.dim());
  for (std::size_t k = 0; k < spec.eigenvalues.size(); ++k)
    if (interval.contains(spec.eigenvalues[k])) p += spec.projectors[k].matrix();
  return HermitianOperator(p);
}

HermitianOperator commutator_hermitian(const HermitianOperator& a, const HermitianOperator& b) {
  require_same_dim(a.dim(), b.dim(), "commutator_hermitian");
  const ComplexMatrix ab = a.matrix() * b.matrix();
  const ComplexMatrix ba = b.matrix() * a.matrix();
  return HermitianOperator(-kI * (ab - ba));
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double trace_norm(const ComplexMatrix& t) {
  require_square(t, "trace_norm");
  Eigen::JacobiSVD<ComplexMatrix> svd(t);
  return svd.singularValues().sum();
}

double trace_norm(const HermitianOperator& a) { return eigenvalues(a.matrix()).cwiseAbs().sum(); }

double operator_norm(const HermitianOperator& a) { return eigenvalues(a.matrix()).cwiseAbs().maxCoeff(); }

bool is_unitary(const ComplexMatrix& u, double tol) {
  if (u.rows() != u.cols() || u.rows() == 0) return false;
  const ComplexMatrix residual = u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols());
  return residual.cwiseAbs().maxCoeff() <= tol;
}

bool is_projection(const HermitianOperator& p, double tol) {
  const ComplexMatrix residual = p.matrix() * p.matrix() - p.matrix();
  return residual.cwiseAbs().maxCoeff() <= tol;
}

HermitianOperator sigma_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return HermitianOperator(m);
}

HermitianOperator sigma_y() {
  ComplexMatrix m(2, 2);
  m << 0, -kI, kI, 0;
  return HermitianOperator(m);
}

HermitianOperator sigma_z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return HermitianOperator(m);
}

HermitianOperator spin_along(const Vec3& u) {
  return HermitianOperator(u[0] * sigma_x().matrix() + u[1] * sigma_y().matrix() +
                           u[2] * sigma_z().matrix());
}

ComplexMatrix annihilation(Eigen::Index dim) {
  if (dim < 2) throw ValidationError("annihilation: dim must be >= 2");
  ComplexMatrix a = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

HermitianOperator ladder_position(Eigen::Index dim) {
  const ComplexMatrix a = annihilation(dim);
  return HermitianOperator((a + a.adjoint()) / std::sqrt(2.0));
}

HermitianOperator ladder_momentum(Eigen::Index dim) {
  const ComplexMatrix a = annihilation(dim);
  return HermitianOperator(kI * (a.adjoint() - a) / std::sqrt(2.0));
}

HermitianOperator grid_position(Eigen::Index points, double lo, double hi) {
  if (points < 2 || !(hi > lo)) throw ValidationError("grid_position: need >= 2 points and hi > lo");
  ComplexMatrix z = ComplexMatrix::Zero(points, points);
  const double step = (hi - lo) / static_cast<double>(points - 1);
  for (Eigen::Index k = 0; k < points; ++k) z(k, k) = lo + step * static_cast<double>(k);
  return HermitianOperator(z);
}

}  // namespace qrlab
