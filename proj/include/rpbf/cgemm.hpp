#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rpbf/complex_matrix.hpp"
#include "rpbf/layout.hpp"
#include "rpbf/problem.hpp"
#include "rpbf/quantpack.hpp"
#include "rpbf/tile_config.hpp"

namespace rpbf {

// Batched complex GEMM engines. Every call is parallel over output blocks and
// batch entries (OpenMP) and never modifies its inputs.

// ---------------------------------------------------------------------------
// float16 in, float32 accumulate/out

/// A operand (M x K) tiled m_outer x k_block and widened to float.
/// Throws NonFiniteError on NaN/inf.
TiledMatrix<float> prepare_half_a(const ComplexMatrix<Half>& a, const TileConfig& tiles);
/// B operand (K x N) tiled k_block x n_outer and widened to float.
TiledMatrix<float> prepare_half_b(const ComplexMatrix<Half>& b, const TileConfig& tiles);

std::vector<ComplexMatrix<float>> gemm_half_tiled(std::span<const TiledMatrix<float>> a,
                                                  std::span<const TiledMatrix<float>> b, const TileConfig& tiles);

/// C[i] = A[i] * B[i] for each batch entry i.
std::vector<ComplexMatrix<float>> gemm_half(std::span<const ComplexMatrix<Half>> a,
                                            std::span<const ComplexMatrix<Half>> b,
                                            const TileConfig& tiles = default_tile_config(Precision::half));

ComplexMatrix<float> gemm_half(const ComplexMatrix<Half>& a, const ComplexMatrix<Half>& b,
                               const TileConfig& tiles = default_tile_config(Precision::half));

// ---------------------------------------------------------------------------
// 1-bit in, int32 accumulate/out
//
// A is M x K packed along K. The K x N operand is supplied packed along K as
// well, i.e. as its N x K transpose (see quantize_to_bits_transposed).
// Results are exact complex dot products of the +-1 +-i values over the
// logical K range; zero-bit padding is cancelled in the real part by the
// (Ai, ~Bi) term and subtracted from the imaginary part in the epilogue.

/// Largest supported padded reduction length (int32 accumulators).
inline constexpr std::size_t kMaxOneBitK = std::size_t{1} << 30;

/// Tiles a packed operand for the 1-bit engine (rows_per_tile x k_block bits).
TiledComplexBits prepare_onebit(const PackedComplex& x, std::size_t rows_per_tile, const TileConfig& tiles);

std::vector<ComplexMatrix<std::int32_t>> gemm_onebit_tiled(std::span<const TiledComplexBits> a,
                                                           std::span<const TiledComplexBits> b_t, BitOp op,
                                                           const TileConfig& tiles);

std::vector<ComplexMatrix<std::int32_t>> gemm_onebit(std::span<const PackedComplex> a,
                                                     std::span<const PackedComplex> b_t, BitOp op = BitOp::xor_,
                                                     const TileConfig& tiles = default_tile_config(Precision::one_bit));

ComplexMatrix<std::int32_t> gemm_onebit_xor(const PackedComplex& a, const PackedComplex& b_t,
                                            const TileConfig& tiles = default_tile_config(Precision::one_bit));
ComplexMatrix<std::int32_t> gemm_onebit_and(const PackedComplex& a, const PackedComplex& b_t,
                                            const TileConfig& tiles = default_tile_config(Precision::one_bit));

/// Real 1-bit dot product of two packed vectors of length k:
/// k - 2 popc(a ^ b). Padding bits must be zero in both.
std::int64_t onebit_dot_xor(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b, std::size_t k);
/// Same value via 2 (popc(a & b) + popc(~a & ~b)) - k over the logical bits.
std::int64_t onebit_dot_and(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b, std::size_t k);

}  // namespace rpbf
