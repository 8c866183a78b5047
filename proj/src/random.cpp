#include "qrlab/random.hpp"

#include <cmath>
#include <numbers>

namespace qrlab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::mt19937_64 substream(std::uint64_t seed, Stream stream, std::uint64_t index, std::uint64_t attempt) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
  h = splitmix64(h ^ index);
  h = splitmix64(h ^ attempt);
  return std::mt19937_64(h);
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double standard_normal(std::mt19937_64& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

ComplexVector random_unit_vector(Eigen::Index dim, std::mt19937_64& rng, Eigen::Index support) {
  if (support <= 0 || support > dim) support = dim;
  ComplexVector v = ComplexVector::Zero(dim);
  for (Eigen::Index k = 0; k < support; ++k) v(k) = Complex(standard_normal(rng), standard_normal(rng));
  const double norm = v.norm();
  if (norm == 0.0) {
    v(0) = 1.0;
    return v;
  }
  return v / norm;
}

ComplexMatrix random_hermitian(Eigen::Index dim, std::mt19937_64& rng, Eigen::Index support) {
  if (support <= 0 || support > dim) support = dim;
  ComplexMatrix g = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < support; ++i)
    for (Eigen::Index j = 0; j < support; ++j) g(i, j) = Complex(standard_normal(rng), standard_normal(rng));
  return 0.5 * (g + g.adjoint());
}

ComplexMatrix random_unitary(Eigen::Index dim, std::mt19937_64& rng) {
  ComplexMatrix g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = Complex(standard_normal(rng), standard_normal(rng));
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < dim; ++k) {
    const double mag = std::abs(r(k, k));
    if (mag > 0.0) q.col(k) *= r(k, k) / mag;
  }
  return q;
}

}  // namespace qrlab
