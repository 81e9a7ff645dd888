#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "altphase/linalg.hpp"

namespace altphase {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; a bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t z) noexcept;

/// Counter-based child seed: the same (master, counters) always yields the
/// same stream, independent of how many other streams were derived.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> counters) noexcept;

/// Standard complex Gaussian: real and imaginary parts i.i.d. N(0, 1).
Complex standard_complex_normal(Rng& rng);

ComplexVector standard_complex_normal(Rng& rng, Eigen::Index n);
ComplexMatrix standard_complex_normal(Rng& rng, Eigen::Index rows, Eigen::Index cols);

/// Uniformly distributed point on the unit sphere of C^n.
ComplexVector uniform_unit_sphere(Rng& rng, Eigen::Index n);

}  // namespace altphase
