#include "rpbf/quantpack.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rpbf/errors.hpp"

namespace rpbf {

namespace {

template <typename T>
float as_float(T v) {
  if constexpr (std::is_same_v<T, Half>) {
    return v.to_float();
  } else {
    return static_cast<float>(v);
  }
}

template <typename T>
bool finite(T v) {
  if constexpr (std::is_same_v<T, Half>) {
    return v.is_finite();
  } else {
    return std::isfinite(v);
  }
}

// Compares by value, so -0.0 >= 0 holds and maps to +1.
template <typename T>
std::uint32_t sign_bit(T v) {
  return as_float(v) >= 0.0f ? 1u : 0u;
}

template <typename T>
void check_finite(const ComplexMatrix<T>& src) {
  for (char plane : {'r', 'i'}) {
    const auto values = plane == 'r' ? src.real() : src.imag();
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!finite(values[i])) throw NonFiniteError(plane, i / src.cols(), i % src.cols());
    }
  }
}

template <typename T>
void pack_rows(std::span<const T> values, std::size_t rows, std::size_t cols, PackedBitMatrix& out) {
#pragma omp parallel for schedule(static)
  for (std::size_t r = 0; r < rows; ++r) {
    const T* row = values.data() + r * cols;
    auto words = out.row(r);
    for (std::size_t w = 0; w < words.size(); ++w) {
      const std::size_t begin = w * kWordBits;
      const std::size_t end = std::min(begin + kWordBits, cols);
      std::uint32_t word = 0;
      for (std::size_t c = begin; c < end; ++c) word |= sign_bit(row[c]) << (c - begin);
      words[w] = word;
    }
  }
}

// Input is rows x cols; output row j holds input column j.
template <typename T>
void pack_columns(std::span<const T> values, std::size_t rows, std::size_t cols, PackedBitMatrix& out) {
  const std::size_t word_count = words_for_bits(rows);
#pragma omp parallel
  {
    std::vector<std::uint32_t> block(cols);
#pragma omp for schedule(static)
    for (std::size_t w = 0; w < word_count; ++w) {
      std::fill(block.begin(), block.end(), 0u);
      const std::size_t begin = w * kWordBits;
      const std::size_t end = std::min(begin + kWordBits, rows);
      for (std::size_t r = begin; r < end; ++r) {
        const T* row = values.data() + r * cols;
        const unsigned shift = static_cast<unsigned>(r - begin);
        for (std::size_t c = 0; c < cols; ++c) block[c] |= sign_bit(row[c]) << shift;
      }
      for (std::size_t c = 0; c < cols; ++c) out.row(c)[w] = block[c];
    }
  }
}

}  // namespace

bool PackedBitMatrix::padding_clear() const noexcept {
  const std::size_t used = cols_ % kWordBits;
  if (used == 0 || words_per_row_ == 0) return true;
  const std::uint32_t mask = ~((1u << used) - 1u);
  for (std::size_t r = 0; r < rows_; ++r) {
    if (words_[r * words_per_row_ + words_per_row_ - 1] & mask) return false;
  }
  return true;
}

template <typename T>
PackedComplex quantize_to_bits(const ComplexMatrix<T>& src) {
  check_finite(src);
  PackedComplex out{PackedBitMatrix(src.rows(), src.cols()), PackedBitMatrix(src.rows(), src.cols())};
  pack_rows(src.real(), src.rows(), src.cols(), out.real);
  pack_rows(src.imag(), src.rows(), src.cols(), out.imag);
  return out;
}

template <typename T>
PackedComplex quantize_to_bits_transposed(const ComplexMatrix<T>& src) {
  check_finite(src);
  PackedComplex out{PackedBitMatrix(src.cols(), src.rows()), PackedBitMatrix(src.cols(), src.rows())};
  pack_columns(src.real(), src.rows(), src.cols(), out.real);
  pack_columns(src.imag(), src.rows(), src.cols(), out.imag);
  return out;
}

PackedBitMatrix pack_bits(std::span<const std::uint8_t> bits, std::size_t width) {
  if (width == 0) throw std::invalid_argument("pack_bits: width must be >= 1");
  if (bits.size() % width != 0) throw ShapeError("pack_bits: bit count is not a multiple of width");
  const std::size_t rows = bits.size() / width;
  PackedBitMatrix out(rows, width);
  for (std::size_t r = 0; r < rows; ++r) {
    auto words = out.row(r);
    for (std::size_t c = 0; c < width; ++c) {
      if (bits[r * width + c]) words[c / kWordBits] |= 1u << (c % kWordBits);
    }
  }
  return out;
}

std::vector<std::int8_t> unpack_bits(const PackedBitMatrix& packed) {
  std::vector<std::int8_t> out(packed.rows() * packed.cols());
  for (std::size_t r = 0; r < packed.rows(); ++r) {
    for (std::size_t c = 0; c < packed.cols(); ++c) {
      out[r * packed.cols() + c] = static_cast<std::int8_t>(packed.value(r, c));
    }
  }
  return out;
}

ComplexMatrix<float> unpack_complex(const PackedComplex& packed) {
  if (packed.real.rows() != packed.imag.rows() || packed.real.cols() != packed.imag.cols()) {
    throw ShapeError("unpack_complex: plane shapes differ");
  }
  ComplexMatrix<float> out(packed.rows(), packed.cols());
  const auto re = unpack_bits(packed.real);
  const auto im = unpack_bits(packed.imag);
  for (std::size_t i = 0; i < re.size(); ++i) {
    out.real()[i] = re[i];
    out.imag()[i] = im[i];
  }
  return out;
}

template PackedComplex quantize_to_bits(const ComplexMatrix<Half>&);
template PackedComplex quantize_to_bits(const ComplexMatrix<float>&);
template PackedComplex quantize_to_bits(const ComplexMatrix<double>&);
template PackedComplex quantize_to_bits_transposed(const ComplexMatrix<Half>&);
template PackedComplex quantize_to_bits_transposed(const ComplexMatrix<float>&);
template PackedComplex quantize_to_bits_transposed(const ComplexMatrix<double>&);

}  // namespace rpbf
