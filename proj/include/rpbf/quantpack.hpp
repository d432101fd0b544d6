#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rpbf/complex_matrix.hpp"

namespace rpbf {

inline constexpr std::size_t kWordBits = 32;

constexpr std::size_t words_for_bits(std::size_t bits) noexcept {
  return (bits + kWordBits - 1) / kWordBits;
}

/// One plane of sign bits. Bit 1 encodes +1, bit 0 encodes -1. Element j of
/// a row lives in word j / 32 at bit j % 32 (LSB first). Bits at and beyond
/// cols() in the last word of a row are always 0.
class PackedBitMatrix {
 public:
  PackedBitMatrix() = default;
  PackedBitMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), words_per_row_(words_for_bits(cols)), words_(rows * words_per_row_) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t cols_padded() const noexcept { return words_per_row_ * kWordBits; }
  std::size_t words_per_row() const noexcept { return words_per_row_; }

  std::span<std::uint32_t> words() noexcept { return words_; }
  std::span<const std::uint32_t> words() const noexcept { return words_; }
  std::span<std::uint32_t> row(std::size_t r) noexcept {
    return std::span(words_).subspan(r * words_per_row_, words_per_row_);
  }
  std::span<const std::uint32_t> row(std::size_t r) const noexcept {
    return std::span(words_).subspan(r * words_per_row_, words_per_row_);
  }

  bool bit(std::size_t r, std::size_t c) const noexcept {
    return (words_[r * words_per_row_ + c / kWordBits] >> (c % kWordBits)) & 1u;
  }
  void set_bit(std::size_t r, std::size_t c, bool value) noexcept {
    std::uint32_t& w = words_[r * words_per_row_ + c / kWordBits];
    const std::uint32_t mask = 1u << (c % kWordBits);
    w = value ? (w | mask) : (w & ~mask);
  }
  /// +1 or -1
  int value(std::size_t r, std::size_t c) const noexcept { return bit(r, c) ? 1 : -1; }

  /// True if every padding bit is 0.
  bool padding_clear() const noexcept;

  friend bool operator==(const PackedBitMatrix&, const PackedBitMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t words_per_row_ = 0;
  std::vector<std::uint32_t> words_;
};

/// A 1-bit complex matrix: one sign plane per component. The four
/// representable values are +-1 +-i.
struct PackedComplex {
  PackedBitMatrix real;
  PackedBitMatrix imag;

  std::size_t rows() const noexcept { return real.rows(); }
  std::size_t cols() const noexcept { return real.cols(); }

  friend bool operator==(const PackedComplex&, const PackedComplex&) = default;
};

/// Sign quantization: bit = 1 iff value >= 0. Both +0.0 and -0.0 map to +1.
/// Throws NonFiniteError on the first NaN/inf (real plane scanned first).
template <typename T>
PackedComplex quantize_to_bits(const ComplexMatrix<T>& src);

/// Quantizes the transpose of `src`: row j of the result holds column j of
/// the input. Used for the K x N operand, which the 1-bit engine consumes
/// packed along K.
template <typename T>
PackedComplex quantize_to_bits_transposed(const ComplexMatrix<T>& src);

/// Packs a row-major 0/1 sequence into rows of `width` bits.
/// bits.size() must be a multiple of width; width must be >= 1.
PackedBitMatrix pack_bits(std::span<const std::uint8_t> bits, std::size_t width);

/// Inverse of pack_bits on the logical region, as +-1 values (row-major).
std::vector<std::int8_t> unpack_bits(const PackedBitMatrix& packed);

/// Expands both planes to a +-1 +-i float matrix.
ComplexMatrix<float> unpack_complex(const PackedComplex& packed);

extern template PackedComplex quantize_to_bits(const ComplexMatrix<Half>&);
extern template PackedComplex quantize_to_bits(const ComplexMatrix<float>&);
extern template PackedComplex quantize_to_bits(const ComplexMatrix<double>&);
extern template PackedComplex quantize_to_bits_transposed(const ComplexMatrix<Half>&);
extern template PackedComplex quantize_to_bits_transposed(const ComplexMatrix<float>&);
extern template PackedComplex quantize_to_bits_transposed(const ComplexMatrix<double>&);

}  // namespace rpbf
