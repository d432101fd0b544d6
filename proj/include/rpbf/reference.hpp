#pragma once

// Brute-force serial oracles. Deliberately unblocked and single-threaded;
// used by tests, the acceptance suite and the CLI --verify flag.

#include <cstdint>
#include <span>
#include <vector>

#include "rpbf/complex_matrix.hpp"
#include "rpbf/quantpack.hpp"

namespace rpbf {

/// Triple-loop complex GEMM in double precision. Inputs are widened exactly.
template <typename T>
ComplexMatrix<double> oracle_cgemm_double(const ComplexMatrix<T>& a, const ComplexMatrix<T>& b);

template <typename T>
std::vector<ComplexMatrix<double>> oracle_cgemm_double(std::span<const ComplexMatrix<T>> a,
                                                       std::span<const ComplexMatrix<T>> b);

/// Expands every bit to +-1, forms the complex products in 64-bit integers
/// over the logical K only, then narrows. `b_t` is the N x K transpose.
ComplexMatrix<std::int32_t> oracle_cgemm_onebit(const PackedComplex& a, const PackedComplex& b_t);

std::vector<ComplexMatrix<std::int32_t>> oracle_cgemm_onebit(std::span<const PackedComplex> a,
                                                             std::span<const PackedComplex> b_t);

/// Relative Frobenius-norm error ||x - ref|| / ||ref|| (absolute if ref == 0).
double relative_frobenius_error(const ComplexMatrix<float>& x, const ComplexMatrix<double>& ref);

extern template ComplexMatrix<double> oracle_cgemm_double(const ComplexMatrix<Half>&, const ComplexMatrix<Half>&);
extern template ComplexMatrix<double> oracle_cgemm_double(const ComplexMatrix<float>&, const ComplexMatrix<float>&);
extern template ComplexMatrix<double> oracle_cgemm_double(const ComplexMatrix<double>&, const ComplexMatrix<double>&);

}  // namespace rpbf
