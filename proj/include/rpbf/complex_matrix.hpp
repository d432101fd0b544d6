#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <type_traits>
#include <vector>

#include "rpbf/half.hpp"

namespace rpbf {

/// Element type codes. The numeric values are part of the binary matrix
/// file format and must not change.
enum class ElementType : std::uint32_t {
  half = 1,
  single = 2,
  double_ = 3,
  one_bit = 4,
  int32 = 5,
};

template <typename T>
struct element_type_of;
template <>
struct element_type_of<Half> {
  static constexpr ElementType value = ElementType::half;
};
template <>
struct element_type_of<float> {
  static constexpr ElementType value = ElementType::single;
};
template <>
struct element_type_of<double> {
  static constexpr ElementType value = ElementType::double_;
};
template <>
struct element_type_of<std::int32_t> {
  static constexpr ElementType value = ElementType::int32;
};

/// Dense complex matrix in planar storage: a row-major real plane and a
/// row-major imaginary plane of identical shape.
template <typename T>
class ComplexMatrix {
 public:
  using value_type = T;

  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), real_(rows * cols), imag_(rows * cols) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return rows_ * cols_; }
  bool empty() const noexcept { return size() == 0; }
  static constexpr ElementType element_type() noexcept { return element_type_of<T>::value; }

  std::span<T> real() noexcept { return real_; }
  std::span<T> imag() noexcept { return imag_; }
  std::span<const T> real() const noexcept { return real_; }
  std::span<const T> imag() const noexcept { return imag_; }

  T& re(std::size_t r, std::size_t c) noexcept { return real_[r * cols_ + c]; }
  T& im(std::size_t r, std::size_t c) noexcept { return imag_[r * cols_ + c]; }
  const T& re(std::size_t r, std::size_t c) const noexcept { return real_[r * cols_ + c]; }
  const T& im(std::size_t r, std::size_t c) const noexcept { return imag_[r * cols_ + c]; }

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> real_;
  std::vector<T> imag_;
};

/// Element-wise conversion between planar matrices (e.g. float -> Half).
template <typename To, typename From>
ComplexMatrix<To> convert(const ComplexMatrix<From>& src) {
  ComplexMatrix<To> out(src.rows(), src.cols());
  auto cast = [](From v) -> To {
    if constexpr (std::is_same_v<To, Half>) {
      return Half::from_float(static_cast<float>(v));
    } else if constexpr (std::is_same_v<From, Half>) {
      return static_cast<To>(v.to_float());
    } else {
      return static_cast<To>(v);
    }
  };
  for (std::size_t i = 0; i < src.size(); ++i) {
    out.real()[i] = cast(src.real()[i]);
    out.imag()[i] = cast(src.imag()[i]);
  }
  return out;
}

}  // namespace rpbf
