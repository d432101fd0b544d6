#include "rpbf/synthetic.hpp"

namespace rpbf {

ComplexMatrix<Half> random_half_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
  ComplexMatrix<Half> m(rows, cols);
  for (auto& v : m.real()) v = Half::from_float(dist(rng));
  for (auto& v : m.imag()) v = Half::from_float(dist(rng));
  return m;
}

ComplexMatrix<float> random_float_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
  ComplexMatrix<float> m(rows, cols);
  for (auto& v : m.real()) v = dist(rng);
  for (auto& v : m.imag()) v = dist(rng);
  return m;
}

PackedComplex random_bit_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  PackedComplex m{PackedBitMatrix(rows, cols), PackedBitMatrix(rows, cols)};
  const std::size_t tail = cols % kWordBits;
  const std::uint32_t last_mask = tail ? (std::uint32_t{1} << tail) - 1u : ~std::uint32_t{0};
  for (auto* plane : {&m.real, &m.imag}) {
    for (std::size_t r = 0; r < rows; ++r) {
      auto row = plane->row(r);
      for (auto& w : row) w = static_cast<std::uint32_t>(rng());
      if (!row.empty()) row.back() &= last_mask;
    }
  }
  return m;
}

}  // namespace rpbf
