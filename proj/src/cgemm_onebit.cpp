#include <algorithm>
#include <bit>
#include <string>

#include "kernels.hpp"
#include "rpbf/cgemm.hpp"
#include "rpbf/errors.hpp"

namespace rpbf {

namespace {

void check_operands(const PackedComplex& a, const PackedComplex& b_t) {
  if (a.real.rows() != a.imag.rows() || a.real.cols() != a.imag.cols() || b_t.real.rows() != b_t.imag.rows() ||
      b_t.real.cols() != b_t.imag.cols()) {
    throw ShapeError("gemm_onebit: real and imaginary planes differ in shape");
  }
  if (a.cols() != b_t.cols()) {
    throw ShapeError("gemm_onebit: reduction lengths differ (" + std::to_string(a.cols()) + " vs " +
                     std::to_string(b_t.cols()) + ")");
  }
  if (a.real.cols_padded() != b_t.real.cols_padded()) throw ShapeError("gemm_onebit: operand padding differs");
  if (!a.real.padding_clear() || !a.imag.padding_clear() || !b_t.real.padding_clear() ||
      !b_t.imag.padding_clear()) {
    throw ShapeError("gemm_onebit: padding bits must be 0");
  }
}

struct BitScratch {
  std::vector<detail::BitCounts> counts;
};

template <bool UseAnd>
void bit_block(const TiledComplexBits& a, const TiledComplexBits& b, std::size_t bm, std::size_t bn,
               const TileConfig& cfg, BitScratch& s, ComplexMatrix<std::int32_t>& c) {
  const std::size_t mo = cfg.m_outer;
  const std::size_t no = cfg.n_outer;
  const std::size_t stride = a.real.tile_words();
  std::fill(s.counts.begin(), s.counts.end(), detail::BitCounts{});

  for (std::size_t kt = 0; kt < a.real.tiles_across(); ++kt) {
    const std::uint32_t* ar = a.real.tile(bm, kt);
    const std::uint32_t* ai = a.imag.tile(bm, kt);
    const std::uint32_t* br = b.real.tile(bn, kt);
    const std::uint32_t* bi = b.imag.tile(bn, kt);
    for (std::size_t mi = 0; mi < mo; mi += cfg.m_inner) {
      for (std::size_t ni = 0; ni < no; ni += cfg.n_inner) {
        for (std::size_t row = mi; row < mi + cfg.m_inner; row += kBitMicroRows) {
          for (std::size_t col = ni; col < ni + cfg.n_inner; col += kBitMicroCols) {
            detail::bit_micro_kernel<UseAnd>(ar + row * stride, ai + row * stride, br + col * stride,
                                             bi + col * stride, stride, stride, s.counts.data() + row * no + col,
                                             no);
          }
        }
      }
    }
  }

  // Every processed bit beyond the logical K is padding (bit 0, value -1).
  const auto k_total = static_cast<std::int32_t>(a.real.padded_cols());
  const auto k_pad = static_cast<std::int32_t>(a.real.padded_cols() - a.real.cols());
  const std::size_t row0 = bm * mo;
  const std::size_t col0 = bn * no;
  const std::size_t rows = std::min(mo, c.rows() - row0);
  const std::size_t cols = std::min(no, c.cols() - col0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < cols; ++j) {
      const detail::BitCounts& n = s.counts[r * no + j];
      std::int32_t re, im;
      if constexpr (UseAnd) {
        // agreements: sum = 2 * agree - 2 * K_total; padding adds +2 per bit to Im
        re = 2 * n.real - 2 * k_total;
        im = 2 * n.imag - 2 * k_total - 2 * k_pad;
      } else {
        re = 2 * (k_total - n.real);
        im = 2 * (k_total - k_pad - n.imag);
      }
      c.re(row0 + r, col0 + j) = re;
      c.im(row0 + r, col0 + j) = im;
    }
  }
}

}  // namespace

TiledComplexBits prepare_onebit(const PackedComplex& x, std::size_t rows_per_tile, const TileConfig& tiles) {
  tiles.validate(Precision::one_bit);
  return tile(x, rows_per_tile, tiles.k_block);
}

std::vector<ComplexMatrix<std::int32_t>> gemm_onebit_tiled(std::span<const TiledComplexBits> a,
                                                           std::span<const TiledComplexBits> b_t, BitOp op,
                                                           const TileConfig& cfg) {
  cfg.validate(Precision::one_bit);
  if (a.size() != b_t.size()) throw ShapeError("gemm_onebit: batch sizes of A and B differ");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].real.cols() != b_t[i].real.cols()) throw ShapeError("gemm_onebit: reduction lengths differ");
    if (a[i].real.tile_rows() != cfg.m_outer || b_t[i].real.tile_rows() != cfg.n_outer ||
        a[i].real.tile_cols() != cfg.k_block || b_t[i].real.tile_cols() != cfg.k_block) {
      throw ShapeError("gemm_onebit: operand tiling does not match the tile config");
    }
    if (a[i].real.padded_cols() >= kMaxOneBitK) throw ShapeError("gemm_onebit: K exceeds the int32 accumulator bound");
  }

  std::vector<ComplexMatrix<std::int32_t>> out;
  out.reserve(a.size());
  std::vector<std::size_t> first_block(a.size() + 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.emplace_back(a[i].real.rows(), b_t[i].real.rows());
    first_block[i + 1] = first_block[i] + a[i].real.tiles_down() * b_t[i].real.tiles_down();
  }
  const std::size_t total = first_block.back();

#pragma omp parallel
  {
    BitScratch s;
    s.counts.resize(cfg.m_outer * cfg.n_outer);
#pragma omp for schedule(dynamic, 1)
    for (std::size_t t = 0; t < total; ++t) {
      const std::size_t entry =
          static_cast<std::size_t>(std::upper_bound(first_block.begin(), first_block.end(), t) - first_block.begin()) -
          1;
      const std::size_t local = t - first_block[entry];
      const std::size_t across = b_t[entry].real.tiles_down();
      if (op == BitOp::and_) {
        bit_block<true>(a[entry], b_t[entry], local / across, local % across, cfg, s, out[entry]);
      } else {
        bit_block<false>(a[entry], b_t[entry], local / across, local % across, cfg, s, out[entry]);
      }
    }
  }
  return out;
}

std::vector<ComplexMatrix<std::int32_t>> gemm_onebit(std::span<const PackedComplex> a,
                                                     std::span<const PackedComplex> b_t, BitOp op,
                                                     const TileConfig& tiles) {
  tiles.validate(Precision::one_bit);
  if (a.size() != b_t.size()) throw ShapeError("gemm_onebit: batch sizes of A and B differ");
  std::vector<TiledComplexBits> ta, tb;
  ta.reserve(a.size());
  tb.reserve(b_t.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    check_operands(a[i], b_t[i]);
    ta.push_back(prepare_onebit(a[i], tiles.m_outer, tiles));
    tb.push_back(prepare_onebit(b_t[i], tiles.n_outer, tiles));
  }
  return gemm_onebit_tiled(ta, tb, op, tiles);
}

ComplexMatrix<std::int32_t> gemm_onebit_xor(const PackedComplex& a, const PackedComplex& b_t,
                                            const TileConfig& tiles) {
  auto out = gemm_onebit(std::span(&a, 1), std::span(&b_t, 1), BitOp::xor_, tiles);
  return std::move(out.front());
}

ComplexMatrix<std::int32_t> gemm_onebit_and(const PackedComplex& a, const PackedComplex& b_t,
                                            const TileConfig& tiles) {
  auto out = gemm_onebit(std::span(&a, 1), std::span(&b_t, 1), BitOp::and_, tiles);
  return std::move(out.front());
}

std::int64_t onebit_dot_xor(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b, std::size_t k) {
  if (a.size() != b.size() || a.size() != words_for_bits(k)) throw ShapeError("onebit_dot: word counts differ");
  std::int64_t differ = 0;
  for (std::size_t w = 0; w < a.size(); ++w) differ += std::popcount(a[w] ^ b[w]);
  // padding bits are 0 in both, so they never differ
  return static_cast<std::int64_t>(k) - 2 * differ;
}

std::int64_t onebit_dot_and(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b, std::size_t k) {
  if (a.size() != b.size() || a.size() != words_for_bits(k)) throw ShapeError("onebit_dot: word counts differ");
  std::int64_t agree = 0;
  for (std::size_t w = 0; w < a.size(); ++w) agree += std::popcount(a[w] & b[w]) + std::popcount(~a[w] & ~b[w]);
  // both-zero padding bits register as agreement; remove them
  const auto pad = static_cast<std::int64_t>(a.size() * kWordBits - k);
  return 2 * (agree - pad) - static_cast<std::int64_t>(k);
}

}  // namespace rpbf
