#include "rpbf/layout.hpp"

#include <string>

namespace rpbf {

TiledBits::TiledBits(std::size_t rows, std::size_t cols, std::size_t tile_rows, std::size_t tile_cols)
    : rows_(rows), cols_(cols), tile_rows_(tile_rows) {
  if (tile_rows == 0 || tile_cols == 0) throw ShapeError("tile dimensions must be >= 1");
  if (tile_cols % kWordBits != 0) {
    throw ShapeError("1-bit tile width must be a multiple of 32 bits, got " + std::to_string(tile_cols));
  }
  tile_words_ = tile_cols / kWordBits;
  tiles_down_ = (rows + tile_rows - 1) / tile_rows;
  tiles_across_ = (words_for_bits(cols) + tile_words_ - 1) / tile_words_;
  words_.assign(tiles_down_ * tiles_across_ * tile_rows_ * tile_words_, 0u);
}

TiledBits tile(const PackedBitMatrix& src, std::size_t tile_rows, std::size_t tile_cols) {
  TiledBits out(src.rows(), src.cols(), tile_rows, tile_cols);
  const std::size_t tw = out.tile_words();
  const std::size_t tiles = out.tiles_down() * out.tiles_across();
  const std::size_t src_words = src.words_per_row();
#pragma omp parallel for schedule(static)
  for (std::size_t t = 0; t < tiles; ++t) {
    const std::size_t ti = t / out.tiles_across();
    const std::size_t tj = t % out.tiles_across();
    std::uint32_t* dst = out.tile(ti, tj);
    const std::size_t row_end = std::min((ti + 1) * tile_rows, src.rows());
    const std::size_t w0 = tj * tw;
    const std::size_t w1 = std::min(w0 + tw, src_words);
    for (std::size_t r = ti * tile_rows; r < row_end; ++r) {
      const auto row = src.row(r);
      std::copy(row.begin() + static_cast<std::ptrdiff_t>(w0), row.begin() + static_cast<std::ptrdiff_t>(w1),
                dst + (r - ti * tile_rows) * tw);
    }
  }
  return out;
}

TiledComplexBits tile(const PackedComplex& src, std::size_t tile_rows, std::size_t tile_cols) {
  return TiledComplexBits{tile(src.real, tile_rows, tile_cols), tile(src.imag, tile_rows, tile_cols)};
}

PackedBitMatrix detile(const TiledBits& src) {
  PackedBitMatrix out(src.rows(), src.cols());
  const std::size_t tw = src.tile_words();
  for (std::size_t r = 0; r < src.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t w = 0; w < row.size(); ++w) {
      row[w] = src.tile(r / src.tile_rows(), w / tw)[(r % src.tile_rows()) * tw + w % tw];
    }
  }
  return out;
}

PackedComplex detile(const TiledComplexBits& src) { return PackedComplex{detile(src.real), detile(src.imag)}; }

}  // namespace rpbf
