#pragma once

// Seeded synthetic operands for benchmarks, tuning and demos.

#include <cstdint>
#include <random>

#include "rpbf/complex_matrix.hpp"
#include "rpbf/quantpack.hpp"

namespace rpbf {

/// Entries uniform in [-1, 1], rounded to float16.
ComplexMatrix<Half> random_half_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng);
/// Entries uniform in [-1, 1].
ComplexMatrix<float> random_float_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng);
/// Independent fair sign bits; padding bits cleared.
PackedComplex random_bit_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng);

}  // namespace rpbf
