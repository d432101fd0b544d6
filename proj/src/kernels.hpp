#pragma once

// Register micro-kernels shared by the GEMM engines and the in-cache peak
// benchmark in ceilings.cpp.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>

#include "rpbf/tile_config.hpp"

namespace rpbf::detail {

using v16sf = float __attribute__((vector_size(64)));

inline v16sf load16(const float* p) noexcept {
  v16sf v;
  std::memcpy(&v, p, sizeof v);
  return v;
}

inline void store16(float* p, v16sf v) noexcept { std::memcpy(p, &v, sizeof v); }

/// C[MR x NR] += A[MR x kc] * B[kc x NR] on planar complex data, as four real
/// products: Re += Re(a)Re(b), Im += Re(a)Im(b), Re += Im(a)(-Im(b)),
/// Im += Im(a)Re(b). `neg_bi` is the caller's private negated copy of Im(b).
inline void half_micro_kernel(const float* __restrict ar, const float* __restrict ai, std::size_t lda,
                              const float* __restrict br, const float* __restrict bi,
                              const float* __restrict neg_bi, std::size_t ldb, std::size_t kc,
                              float* __restrict cr, float* __restrict ci, std::size_t ldc) {
  constexpr std::size_t MR = kHalfMicroRows;
  static_assert(kHalfMicroCols == 16);
  v16sf acc_r[MR];
  v16sf acc_i[MR];
  for (std::size_t r = 0; r < MR; ++r) {
    acc_r[r] = load16(cr + r * ldc);
    acc_i[r] = load16(ci + r * ldc);
  }
  for (std::size_t k = 0; k < kc; ++k) {
    const v16sf b_re = load16(br + k * ldb);
    const v16sf b_im = load16(bi + k * ldb);
    const v16sf b_nim = load16(neg_bi + k * ldb);
    for (std::size_t r = 0; r < MR; ++r) {
      const float a_re = ar[r * lda + k];
      const float a_im = ai[r * lda + k];
      acc_r[r] += a_re * b_re;
      acc_i[r] += a_re * b_im;
      acc_r[r] += a_im * b_nim;
      acc_i[r] += a_im * b_re;
    }
  }
  for (std::size_t r = 0; r < MR; ++r) {
    store16(cr + r * ldc, acc_r[r]);
    store16(ci + r * ldc, acc_i[r]);
  }
}

inline std::uint64_t load64(const std::uint32_t* p) noexcept {
  std::uint64_t v;
  std::memcpy(&v, p, sizeof v);
  return v;
}

/// Popcount sums for one output element. For xor_ these are mismatch counts,
/// for and_ match counts.
struct BitCounts {
  std::int32_t real = 0;
  std::int32_t imag = 0;
};

/// Accumulates counts for a 2 x 2 output micro-tile over `words` 32-bit words
/// (an even number). Row pointers index rows of A and rows of the packed
/// transposed B; `stride` is the row pitch in words.
template <bool UseAnd>
inline void bit_micro_kernel(const std::uint32_t* __restrict a_re, const std::uint32_t* __restrict a_im,
                             const std::uint32_t* __restrict b_re, const std::uint32_t* __restrict b_im,
                             std::size_t stride, std::size_t words, BitCounts* out, std::size_t ldo) {
  static_assert(kBitMicroRows == 2 && kBitMicroCols == 2);
  std::uint64_t r00 = 0, r01 = 0, r10 = 0, r11 = 0;
  std::uint64_t i00 = 0, i01 = 0, i10 = 0, i11 = 0;
  const std::uint32_t* ar0 = a_re;
  const std::uint32_t* ar1 = a_re + stride;
  const std::uint32_t* ai0 = a_im;
  const std::uint32_t* ai1 = a_im + stride;
  const std::uint32_t* br0 = b_re;
  const std::uint32_t* br1 = b_re + stride;
  const std::uint32_t* bi0 = b_im;
  const std::uint32_t* bi1 = b_im + stride;

  // popc over the real-part pair (Ar,Br),(Ai,~Bi) and imaginary-part pair
  // (Ar,Bi),(Ai,Br); AND counts agreement as (x & y) + (~x & ~y).
  auto real_term = [](std::uint64_t xr, std::uint64_t xi, std::uint64_t yr, std::uint64_t yi) -> std::uint64_t {
    const std::uint64_t nyi = ~yi;
    if constexpr (UseAnd) {
      return std::popcount(xr & yr) + std::popcount(~xr & ~yr) + std::popcount(xi & nyi) +
             std::popcount(~xi & ~nyi);
    } else {
      return std::popcount(xr ^ yr) + std::popcount(xi ^ nyi);
    }
  };
  auto imag_term = [](std::uint64_t xr, std::uint64_t xi, std::uint64_t yr, std::uint64_t yi) -> std::uint64_t {
    if constexpr (UseAnd) {
      return std::popcount(xr & yi) + std::popcount(~xr & ~yi) + std::popcount(xi & yr) +
             std::popcount(~xi & ~yr);
    } else {
      return std::popcount(xr ^ yi) + std::popcount(xi ^ yr);
    }
  };

  for (std::size_t w = 0; w < words; w += 2) {
    const std::uint64_t xr0 = load64(ar0 + w), xi0 = load64(ai0 + w);
    const std::uint64_t xr1 = load64(ar1 + w), xi1 = load64(ai1 + w);
    const std::uint64_t yr0 = load64(br0 + w), yi0 = load64(bi0 + w);
    const std::uint64_t yr1 = load64(br1 + w), yi1 = load64(bi1 + w);
    r00 += real_term(xr0, xi0, yr0, yi0);
    i00 += imag_term(xr0, xi0, yr0, yi0);
    r01 += real_term(xr0, xi0, yr1, yi1);
    i01 += imag_term(xr0, xi0, yr1, yi1);
    r10 += real_term(xr1, xi1, yr0, yi0);
    i10 += imag_term(xr1, xi1, yr0, yi0);
    r11 += real_term(xr1, xi1, yr1, yi1);
    i11 += imag_term(xr1, xi1, yr1, yi1);
  }
  out[0].real += static_cast<std::int32_t>(r00);
  out[0].imag += static_cast<std::int32_t>(i00);
  out[1].real += static_cast<std::int32_t>(r01);
  out[1].imag += static_cast<std::int32_t>(i01);
  out[ldo].real += static_cast<std::int32_t>(r10);
  out[ldo].imag += static_cast<std::int32_t>(i10);
  out[ldo + 1].real += static_cast<std::int32_t>(r11);
  out[ldo + 1].imag += static_cast<std::int32_t>(i11);
}

}  // namespace rpbf::detail
