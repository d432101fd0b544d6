#pragma once

// Test-side generators and brute-force oracles, written independently of the
// library code they check.

#include <complex>
#include <cstdint>
#include <random>
#include <type_traits>

#include "rpbf/complex_matrix.hpp"
#include "rpbf/quantpack.hpp"

namespace support {

inline rpbf::ComplexMatrix<rpbf::Half> make_half(std::size_t rows, std::size_t cols, std::mt19937& rng,
                                                 float lo = -1.0f, float hi = 1.0f) {
  std::uniform_real_distribution<float> d(lo, hi);
  rpbf::ComplexMatrix<rpbf::Half> m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      m.re(r, c) = rpbf::Half::from_float(d(rng));
      m.im(r, c) = rpbf::Half::from_float(d(rng));
    }
  }
  return m;
}

inline rpbf::PackedComplex make_bits(std::size_t rows, std::size_t cols, std::mt19937& rng) {
  rpbf::PackedComplex m{rpbf::PackedBitMatrix(rows, cols), rpbf::PackedBitMatrix(rows, cols)};
  std::bernoulli_distribution coin(0.5);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      m.real.set_bit(r, c, coin(rng));
      m.imag.set_bit(r, c, coin(rng));
    }
  }
  return m;
}

/// Sign value of element (r, c) read straight from the word array.
inline int sign_at(const rpbf::PackedBitMatrix& m, std::size_t r, std::size_t c) {
  const std::uint32_t word = m.words()[r * m.words_per_row() + c / 32];
  return ((word >> (c % 32)) & 1u) ? 1 : -1;
}

/// C = A * B with b_t the N x K transpose, via std::complex<long long>.
inline rpbf::ComplexMatrix<std::int32_t> brute_onebit(const rpbf::PackedComplex& a, const rpbf::PackedComplex& b_t) {
  rpbf::ComplexMatrix<std::int32_t> c(a.rows(), b_t.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b_t.rows(); ++j) {
      std::complex<long long> sum{};
      for (std::size_t k = 0; k < a.cols(); ++k) {
        const std::complex<long long> x(sign_at(a.real, i, k), sign_at(a.imag, i, k));
        const std::complex<long long> y(sign_at(b_t.real, j, k), sign_at(b_t.imag, j, k));
        sum += x * y;
      }
      c.re(i, j) = static_cast<std::int32_t>(sum.real());
      c.im(i, j) = static_cast<std::int32_t>(sum.imag());
    }
  }
  return c;
}

/// C = A * B accumulated in long double with the k loop reversed.
template <typename T>
rpbf::ComplexMatrix<double> brute_reversed(const rpbf::ComplexMatrix<T>& a, const rpbf::ComplexMatrix<T>& b) {
  auto widen = [](T v) -> long double {
    if constexpr (std::is_same_v<T, rpbf::Half>) {
      return v.to_float();
    } else {
      return static_cast<long double>(v);
    }
  };
  rpbf::ComplexMatrix<double> c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      long double re = 0, im = 0;
      for (std::size_t k = a.cols(); k-- > 0;) {
        const long double ar = widen(a.re(i, k)), ai = widen(a.im(i, k));
        const long double br = widen(b.re(k, j)), bi = widen(b.im(k, j));
        re += ar * br - ai * bi;
        im += ar * bi + ai * br;
      }
      c.re(i, j) = static_cast<double>(re);
      c.im(i, j) = static_cast<double>(im);
    }
  }
  return c;
}

}  // namespace support
