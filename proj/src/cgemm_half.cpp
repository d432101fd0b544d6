#include <algorithm>
#include <string>

#include "kernels.hpp"
#include "rpbf/cgemm.hpp"
#include "rpbf/errors.hpp"

namespace rpbf {

namespace {

void check_finite(const ComplexMatrix<Half>& x) {
  for (char plane : {'r', 'i'}) {
    const auto values = plane == 'r' ? x.real() : x.imag();
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!values[i].is_finite()) throw NonFiniteError(plane, i / x.cols(), i % x.cols());
    }
  }
}

struct HalfScratch {
  std::vector<float> acc_re;
  std::vector<float> acc_im;
  std::vector<float> neg_b_im;
};

void half_block(const TiledMatrix<float>& a, const TiledMatrix<float>& b, std::size_t bm, std::size_t bn,
                const TileConfig& cfg, HalfScratch& s, ComplexMatrix<float>& c) {
  const std::size_t mo = cfg.m_outer;
  const std::size_t no = cfg.n_outer;
  const std::size_t kb = cfg.k_block;
  std::fill(s.acc_re.begin(), s.acc_re.end(), 0.0f);
  std::fill(s.acc_im.begin(), s.acc_im.end(), 0.0f);

  for (std::size_t kt = 0; kt < a.tiles_across(); ++kt) {
    const float* ar = a.tile_real(bm, kt);
    const float* ai = a.tile_imag(bm, kt);
    const float* br = b.tile_real(kt, bn);
    const float* bi = b.tile_imag(kt, bn);
    // Im(b) is negated in a private copy; the operand itself is untouched.
    for (std::size_t i = 0; i < kb * no; ++i) s.neg_b_im[i] = -bi[i];

    for (std::size_t mi = 0; mi < mo; mi += cfg.m_inner) {
      for (std::size_t ni = 0; ni < no; ni += cfg.n_inner) {
        for (std::size_t col = ni; col < ni + cfg.n_inner; col += kHalfMicroCols) {
          for (std::size_t row = mi; row < mi + cfg.m_inner; row += kHalfMicroRows) {
            detail::half_micro_kernel(ar + row * kb, ai + row * kb, kb, br + col, bi + col,
                                      s.neg_b_im.data() + col, no, kb, s.acc_re.data() + row * no + col,
                                      s.acc_im.data() + row * no + col, no);
          }
        }
      }
    }
  }

  const std::size_t row0 = bm * mo;
  const std::size_t col0 = bn * no;
  const std::size_t rows = std::min(mo, c.rows() - row0);
  const std::size_t cols = std::min(no, c.cols() - col0);
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy_n(s.acc_re.data() + r * no, cols, c.real().data() + (row0 + r) * c.cols() + col0);
    std::copy_n(s.acc_im.data() + r * no, cols, c.imag().data() + (row0 + r) * c.cols() + col0);
  }
}

}  // namespace

TiledMatrix<float> prepare_half_a(const ComplexMatrix<Half>& a, const TileConfig& tiles) {
  tiles.validate(Precision::half);
  check_finite(a);
  return tile_as<float>(a, tiles.m_outer, tiles.k_block);
}

TiledMatrix<float> prepare_half_b(const ComplexMatrix<Half>& b, const TileConfig& tiles) {
  tiles.validate(Precision::half);
  check_finite(b);
  return tile_as<float>(b, tiles.k_block, tiles.n_outer);
}

std::vector<ComplexMatrix<float>> gemm_half_tiled(std::span<const TiledMatrix<float>> a,
                                                  std::span<const TiledMatrix<float>> b, const TileConfig& cfg) {
  cfg.validate(Precision::half);
  if (a.size() != b.size()) throw ShapeError("gemm_half: batch sizes of A and B differ");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].cols() != b[i].rows()) {
      throw ShapeError("gemm_half: inner dimensions differ (" + std::to_string(a[i].cols()) + " vs " +
                       std::to_string(b[i].rows()) + ")");
    }
    if (a[i].tile_rows() != cfg.m_outer || a[i].tile_cols() != cfg.k_block || b[i].tile_rows() != cfg.k_block ||
        b[i].tile_cols() != cfg.n_outer) {
      throw ShapeError("gemm_half: operand tiling does not match the tile config");
    }
  }

  std::vector<ComplexMatrix<float>> out;
  out.reserve(a.size());
  std::vector<std::size_t> first_block(a.size() + 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.emplace_back(a[i].rows(), b[i].cols());
    first_block[i + 1] = first_block[i] + a[i].tiles_down() * b[i].tiles_across();
  }
  const std::size_t total = first_block.back();

#pragma omp parallel
  {
    HalfScratch s;
    s.acc_re.resize(cfg.m_outer * cfg.n_outer);
    s.acc_im.resize(cfg.m_outer * cfg.n_outer);
    s.neg_b_im.resize(cfg.k_block * cfg.n_outer);
#pragma omp for schedule(dynamic, 1)
    for (std::size_t t = 0; t < total; ++t) {
      const std::size_t entry =
          static_cast<std::size_t>(std::upper_bound(first_block.begin(), first_block.end(), t) - first_block.begin()) -
          1;
      const std::size_t local = t - first_block[entry];
      const std::size_t across = b[entry].tiles_across();
      half_block(a[entry], b[entry], local / across, local % across, cfg, s, out[entry]);
    }
  }
  return out;
}

std::vector<ComplexMatrix<float>> gemm_half(std::span<const ComplexMatrix<Half>> a,
                                            std::span<const ComplexMatrix<Half>> b, const TileConfig& tiles) {
  if (a.size() != b.size()) throw ShapeError("gemm_half: batch sizes of A and B differ");
  std::vector<TiledMatrix<float>> ta, tb;
  ta.reserve(a.size());
  tb.reserve(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].cols() != b[i].rows()) {
      throw ShapeError("gemm_half: inner dimensions differ (" + std::to_string(a[i].cols()) + " vs " +
                       std::to_string(b[i].rows()) + ")");
    }
    ta.push_back(prepare_half_a(a[i], tiles));
    tb.push_back(prepare_half_b(b[i], tiles));
  }
  return gemm_half_tiled(ta, tb, tiles);
}

ComplexMatrix<float> gemm_half(const ComplexMatrix<Half>& a, const ComplexMatrix<Half>& b, const TileConfig& tiles) {
  auto out = gemm_half(std::span(&a, 1), std::span(&b, 1), tiles);
  return std::move(out.front());
}

}  // namespace rpbf
