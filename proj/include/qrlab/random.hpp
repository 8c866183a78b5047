#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include "qrlab/operator_core.hpp"

namespace qrlab {

/// Stream identifiers keep independent consumers of one seed apart.
enum class Stream : std::uint64_t {
  StateSampler = 1,
  RangeRefinement = 2,
  BellPairs = 3,
  Dichotomic = 4,
  OrderExtent = 5,
  Instances = 6,
  Outcomes = 7,
};

/// Counter-based substream: the engine for (seed, stream, index) does not
/// depend on how many other indices were drawn, so parallel and serial
/// evaluation produce identical sequences.
std::mt19937_64 substream(std::uint64_t seed, Stream stream, std::uint64_t index,
                          std::uint64_t attempt = 0);

// Distributions are implemented here rather than through <random> so that the
// drawn values are identical across standard library implementations.

/// Uniform on [0, 1).
double uniform01(std::mt19937_64& rng);
/// Standard normal (Box-Muller).
double standard_normal(std::mt19937_64& rng);

/// Haar-random unit vector in the first `support` coordinates of C^dim.
ComplexVector random_unit_vector(Eigen::Index dim, std::mt19937_64& rng,
                                 Eigen::Index support = -1);
/// GUE-like random Hermitian matrix supported on the first `support` coordinates.
ComplexMatrix random_hermitian(Eigen::Index dim, std::mt19937_64& rng,
                               Eigen::Index support = -1);
/// Haar-random unitary (QR of a Ginibre matrix with phase correction).
ComplexMatrix random_unitary(Eigen::Index dim, std::mt19937_64& rng);

}  // namespace qrlab
