#pragma once

#include <cmath>
#include <cstdint>

#include "qrlab/random.hpp"
#include "qrlab/state_space.hpp"

namespace qrlab::test {

inline std::mt19937_64 rng(std::uint64_t index) { return substream(20261016, Stream::Instances, index); }

// rho = (I + x.sigma) / 2.
inline DensityState bloch_state(const Vec3& x) {
  ComplexMatrix m = 0.5 * ComplexMatrix::Identity(2, 2);
  m += 0.5 * (x[0] * sigma_x().matrix() + x[1] * sigma_y().matrix() + x[2] * sigma_z().matrix());
  return DensityState(m);
}

inline Vec3 bloch_vector(const DensityState& rho) {
  return {rho.expectation(sigma_x()), rho.expectation(sigma_y()), rho.expectation(sigma_z())};
}

inline double norm3(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

// Uniform point of the Bloch ball scaled by `max_radius`.
inline Vec3 random_bloch(std::mt19937_64& g, double max_radius = 1.0) {
  Vec3 v{standard_normal(g), standard_normal(g), standard_normal(g)};
  const double n = norm3(v);
  const double r = max_radius * std::cbrt(uniform01(g));
  return {r * v[0] / n, r * v[1] / n, r * v[2] / n};
}

inline DensityState random_state(Eigen::Index dim, std::mt19937_64& g) {
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  // Mixture of a few random pure states.
  for (int k = 0; k < 3; ++k) {
    const ComplexVector v = random_unit_vector(dim, g);
    m += uniform01(g) * v * v.adjoint();
  }
  m /= m.trace().real();
  return DensityState(m);
}

inline HermitianOperator random_operator(Eigen::Index dim, std::mt19937_64& g) {
  return HermitianOperator(random_hermitian(dim, g));
}

}  // namespace qrlab::test
