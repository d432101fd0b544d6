#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rpbf/complex_matrix.hpp"
#include "rpbf/errors.hpp"
#include "rpbf/quantpack.hpp"

namespace rpbf {

/// A matrix re-laid out as a grid of fixed-size tiles. Tiles are stored
/// contiguously in row-major grid order; elements inside a tile are
/// row-major. Padded dimensions are the smallest tile multiples covering
/// the logical ones and padding elements are zero.
template <typename T>
class TiledMatrix {
 public:
  TiledMatrix() = default;
  TiledMatrix(std::size_t rows, std::size_t cols, std::size_t tile_rows, std::size_t tile_cols)
      : rows_(rows), cols_(cols), tile_rows_(tile_rows), tile_cols_(tile_cols) {
    if (tile_rows == 0 || tile_cols == 0) throw ShapeError("tile dimensions must be >= 1");
    tiles_down_ = (rows + tile_rows - 1) / tile_rows;
    tiles_across_ = (cols + tile_cols - 1) / tile_cols;
    real_.assign(tiles_down_ * tiles_across_ * tile_rows * tile_cols, T{});
    imag_.assign(real_.size(), T{});
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t tile_rows() const noexcept { return tile_rows_; }
  std::size_t tile_cols() const noexcept { return tile_cols_; }
  std::size_t tiles_down() const noexcept { return tiles_down_; }
  std::size_t tiles_across() const noexcept { return tiles_across_; }
  std::size_t padded_rows() const noexcept { return tiles_down_ * tile_rows_; }
  std::size_t padded_cols() const noexcept { return tiles_across_ * tile_cols_; }
  std::size_t tile_elems() const noexcept { return tile_rows_ * tile_cols_; }

  std::span<T> real() noexcept { return real_; }
  std::span<T> imag() noexcept { return imag_; }
  std::span<const T> real() const noexcept { return real_; }
  std::span<const T> imag() const noexcept { return imag_; }

  std::size_t tile_offset(std::size_t ti, std::size_t tj) const noexcept {
    return (ti * tiles_across_ + tj) * tile_elems();
  }
  const T* tile_real(std::size_t ti, std::size_t tj) const noexcept { return real_.data() + tile_offset(ti, tj); }
  const T* tile_imag(std::size_t ti, std::size_t tj) const noexcept { return imag_.data() + tile_offset(ti, tj); }

  /// Element at padded coordinates (r, c).
  const T& re(std::size_t r, std::size_t c) const noexcept { return real_[index(r, c)]; }
  const T& im(std::size_t r, std::size_t c) const noexcept { return imag_[index(r, c)]; }

 private:
  std::size_t index(std::size_t r, std::size_t c) const noexcept {
    return tile_offset(r / tile_rows_, c / tile_cols_) + (r % tile_rows_) * tile_cols_ + c % tile_cols_;
  }

  std::size_t rows_ = 0, cols_ = 0;
  std::size_t tile_rows_ = 1, tile_cols_ = 1;
  std::size_t tiles_down_ = 0, tiles_across_ = 0;
  std::vector<T> real_;
  std::vector<T> imag_;
};

namespace detail {
template <typename Out, typename In>
inline Out widen(In v) {
  if constexpr (std::is_same_v<Out, In>) {
    return v;
  } else if constexpr (std::is_same_v<In, Half>) {
    return static_cast<Out>(v.to_float());
  } else if constexpr (std::is_same_v<Out, Half>) {
    return Half::from_float(static_cast<float>(v));
  } else {
    return static_cast<Out>(v);
  }
}
}  // namespace detail

/// Tiles `src`, converting each element to Out (e.g. Half -> float).
template <typename Out, typename In>
TiledMatrix<Out> tile_as(const ComplexMatrix<In>& src, std::size_t tile_rows, std::size_t tile_cols) {
  TiledMatrix<Out> out(src.rows(), src.cols(), tile_rows, tile_cols);
  const std::size_t tiles = out.tiles_down() * out.tiles_across();
  const auto tiles_across = out.tiles_across();
  const auto re = out.real();
  const auto im = out.imag();
#pragma omp parallel for schedule(static)
  for (std::size_t t = 0; t < tiles; ++t) {
    const std::size_t ti = t / tiles_across;
    const std::size_t tj = t % tiles_across;
    const std::size_t row0 = ti * tile_rows;
    const std::size_t col0 = tj * tile_cols;
    const std::size_t row_end = std::min(row0 + tile_rows, src.rows());
    const std::size_t col_end = std::min(col0 + tile_cols, src.cols());
    Out* dr = re.data() + t * tile_rows * tile_cols;
    Out* di = im.data() + t * tile_rows * tile_cols;
    for (std::size_t r = row0; r < row_end; ++r) {
      const In* sr = src.real().data() + r * src.cols();
      const In* si = src.imag().data() + r * src.cols();
      const std::size_t off = (r - row0) * tile_cols;
      for (std::size_t c = col0; c < col_end; ++c) {
        dr[off + c - col0] = detail::widen<Out>(sr[c]);
        di[off + c - col0] = detail::widen<Out>(si[c]);
      }
    }
  }
  return out;
}

template <typename T>
TiledMatrix<T> tile(const ComplexMatrix<T>& src, std::size_t tile_rows, std::size_t tile_cols) {
  return tile_as<T>(src, tile_rows, tile_cols);
}

/// Recovers the logical region of a tiled matrix.
template <typename T>
ComplexMatrix<T> detile(const TiledMatrix<T>& src) {
  ComplexMatrix<T> out(src.rows(), src.cols());
  for (std::size_t r = 0; r < src.rows(); ++r) {
    for (std::size_t c = 0; c < src.cols(); ++c) {
      out.re(r, c) = src.re(r, c);
      out.im(r, c) = src.im(r, c);
    }
  }
  return out;
}

/// Tiled form of a packed bit plane. Tile columns are whole 32-bit words;
/// padding words and padding rows are all-zero bits (value -1).
class TiledBits {
 public:
  TiledBits() = default;
  TiledBits(std::size_t rows, std::size_t cols, std::size_t tile_rows, std::size_t tile_cols);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t tile_rows() const noexcept { return tile_rows_; }
  std::size_t tile_cols() const noexcept { return tile_words_ * kWordBits; }
  std::size_t tile_words() const noexcept { return tile_words_; }
  std::size_t tiles_down() const noexcept { return tiles_down_; }
  std::size_t tiles_across() const noexcept { return tiles_across_; }
  std::size_t padded_rows() const noexcept { return tiles_down_ * tile_rows_; }
  std::size_t padded_cols() const noexcept { return tiles_across_ * tile_cols(); }

  std::span<std::uint32_t> words() noexcept { return words_; }
  std::span<const std::uint32_t> words() const noexcept { return words_; }
  const std::uint32_t* tile(std::size_t ti, std::size_t tj) const noexcept {
    return words_.data() + (ti * tiles_across_ + tj) * tile_rows_ * tile_words_;
  }
  std::uint32_t* tile(std::size_t ti, std::size_t tj) noexcept {
    return words_.data() + (ti * tiles_across_ + tj) * tile_rows_ * tile_words_;
  }

  bool bit(std::size_t r, std::size_t c) const noexcept {
    const std::uint32_t* t = tile(r / tile_rows_, c / tile_cols());
    const std::size_t local = c % tile_cols();
    return (t[(r % tile_rows_) * tile_words_ + local / kWordBits] >> (local % kWordBits)) & 1u;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::size_t tile_rows_ = 1, tile_words_ = 1;
  std::size_t tiles_down_ = 0, tiles_across_ = 0;
  std::vector<std::uint32_t> words_;
};

struct TiledComplexBits {
  TiledBits real;
  TiledBits imag;
};

/// tile_cols is in bits and must be a multiple of 32.
TiledBits tile(const PackedBitMatrix& src, std::size_t tile_rows, std::size_t tile_cols);
TiledComplexBits tile(const PackedComplex& src, std::size_t tile_rows, std::size_t tile_cols);
PackedBitMatrix detile(const TiledBits& src);
PackedComplex detile(const TiledComplexBits& src);

/// Splits an interleaved (re, im, re, im, ...) row-major array into planes.
template <typename T>
ComplexMatrix<T> interleaved_to_planar(std::span<const T> src, std::size_t rows, std::size_t cols) {
  if (src.size() != rows * cols * 2) {
    throw ShapeError("interleaved_to_planar: expected " + std::to_string(rows * cols * 2) + " values, got " +
                     std::to_string(src.size()));
  }
  ComplexMatrix<T> out(rows, cols);
  for (std::size_t i = 0; i < rows * cols; ++i) {
    out.real()[i] = src[2 * i];
    out.imag()[i] = src[2 * i + 1];
  }
  return out;
}

template <typename T>
std::vector<T> planar_to_interleaved(const ComplexMatrix<T>& src) {
  std::vector<T> out(src.size() * 2);
  for (std::size_t i = 0; i < src.size(); ++i) {
    out[2 * i] = src.real()[i];
    out[2 * i + 1] = src.imag()[i];
  }
  return out;
}

template <typename T>
ComplexMatrix<T> transpose(const ComplexMatrix<T>& src) {
  ComplexMatrix<T> out(src.cols(), src.rows());
  constexpr std::size_t kBlock = 32;
#pragma omp parallel for schedule(static)
  for (std::size_t r0 = 0; r0 < src.rows(); r0 += kBlock) {
    for (std::size_t c0 = 0; c0 < src.cols(); c0 += kBlock) {
      const std::size_t r1 = std::min(r0 + kBlock, src.rows());
      const std::size_t c1 = std::min(c0 + kBlock, src.cols());
      for (std::size_t r = r0; r < r1; ++r) {
        for (std::size_t c = c0; c < c1; ++c) {
          out.re(c, r) = src.re(r, c);
          out.im(c, r) = src.im(r, c);
        }
      }
    }
  }
  return out;
}

}  // namespace rpbf
