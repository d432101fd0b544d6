#include "rpbf/reference.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "rpbf/errors.hpp"

namespace rpbf {

namespace {

template <typename T>
double widen(T v) {
  if constexpr (std::is_same_v<T, Half>) {
    return static_cast<double>(v.to_float());
  } else {
    return static_cast<double>(v);
  }
}

template <typename T>
std::vector<double> widen_plane(std::span<const T> plane) {
  std::vector<double> out(plane.size());
  for (std::size_t i = 0; i < plane.size(); ++i) out[i] = widen(plane[i]);
  return out;
}

std::vector<std::int8_t> expand(const PackedBitMatrix& m) { return unpack_bits(m); }

}  // namespace

template <typename T>
ComplexMatrix<double> oracle_cgemm_double(const ComplexMatrix<T>& a, const ComplexMatrix<T>& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("oracle_cgemm_double: inner dimensions differ (" + std::to_string(a.cols()) + " vs " +
                     std::to_string(b.rows()) + ")");
  }
  const std::size_t m = a.rows(), n = b.cols(), k = a.cols();
  const auto ar = widen_plane(a.real()), ai = widen_plane(a.imag());
  const auto br = widen_plane(b.real()), bi = widen_plane(b.imag());
  ComplexMatrix<double> c(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double re = 0.0, im = 0.0;
      for (std::size_t p = 0; p < k; ++p) {
        const double xr = ar[i * k + p], xi = ai[i * k + p];
        const double yr = br[p * n + j], yi = bi[p * n + j];
        re += xr * yr - xi * yi;
        im += xr * yi + xi * yr;
      }
      c.re(i, j) = re;
      c.im(i, j) = im;
    }
  }
  return c;
}

template <typename T>
std::vector<ComplexMatrix<double>> oracle_cgemm_double(std::span<const ComplexMatrix<T>> a,
                                                       std::span<const ComplexMatrix<T>> b) {
  if (a.size() != b.size()) throw ShapeError("oracle_cgemm_double: batch sizes differ");
  std::vector<ComplexMatrix<double>> out;
  out.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(oracle_cgemm_double(a[i], b[i]));
  return out;
}

ComplexMatrix<std::int32_t> oracle_cgemm_onebit(const PackedComplex& a, const PackedComplex& b_t) {
  if (a.cols() != b_t.cols()) throw ShapeError("oracle_cgemm_onebit: reduction lengths differ");
  const std::size_t m = a.rows(), n = b_t.rows(), k = a.cols();
  const auto ar = expand(a.real), ai = expand(a.imag);
  const auto br = expand(b_t.real), bi = expand(b_t.imag);
  ComplexMatrix<std::int32_t> c(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    const std::int8_t* xr = ar.data() + i * k;
    const std::int8_t* xi = ai.data() + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      const std::int8_t* yr = br.data() + j * k;
      const std::int8_t* yi = bi.data() + j * k;
      std::int64_t re = 0, im = 0;
      for (std::size_t p = 0; p < k; ++p) {
        re += std::int64_t{xr[p]} * yr[p] - std::int64_t{xi[p]} * yi[p];
        im += std::int64_t{xr[p]} * yi[p] + std::int64_t{xi[p]} * yr[p];
      }
      c.re(i, j) = static_cast<std::int32_t>(re);
      c.im(i, j) = static_cast<std::int32_t>(im);
    }
  }
  return c;
}

std::vector<ComplexMatrix<std::int32_t>> oracle_cgemm_onebit(std::span<const PackedComplex> a,
                                                             std::span<const PackedComplex> b_t) {
  if (a.size() != b_t.size()) throw ShapeError("oracle_cgemm_onebit: batch sizes differ");
  std::vector<ComplexMatrix<std::int32_t>> out;
  out.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(oracle_cgemm_onebit(a[i], b_t[i]));
  return out;
}

double relative_frobenius_error(const ComplexMatrix<float>& x, const ComplexMatrix<double>& ref) {
  if (x.rows() != ref.rows() || x.cols() != ref.cols()) throw ShapeError("relative_frobenius_error: shapes differ");
  double diff = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dr = x.real()[i] - ref.real()[i];
    const double di = x.imag()[i] - ref.imag()[i];
    diff += dr * dr + di * di;
    norm += ref.real()[i] * ref.real()[i] + ref.imag()[i] * ref.imag()[i];
  }
  return norm > 0.0 ? std::sqrt(diff / norm) : std::sqrt(diff);
}

template ComplexMatrix<double> oracle_cgemm_double(const ComplexMatrix<Half>&, const ComplexMatrix<Half>&);
template ComplexMatrix<double> oracle_cgemm_double(const ComplexMatrix<float>&, const ComplexMatrix<float>&);
template ComplexMatrix<double> oracle_cgemm_double(const ComplexMatrix<double>&, const ComplexMatrix<double>&);
template std::vector<ComplexMatrix<double>> oracle_cgemm_double(std::span<const ComplexMatrix<Half>>,
                                                                std::span<const ComplexMatrix<Half>>);
template std::vector<ComplexMatrix<double>> oracle_cgemm_double(std::span<const ComplexMatrix<float>>,
                                                                std::span<const ComplexMatrix<float>>);
template std::vector<ComplexMatrix<double>> oracle_cgemm_double(std::span<const ComplexMatrix<double>>,
                                                                std::span<const ComplexMatrix<double>>);

}  // namespace rpbf
