#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "rpbf/layout.hpp"
#include "support.hpp"

using namespace rpbf;

namespace {

ComplexMatrix<float> counting(std::size_t rows, std::size_t cols) {
  ComplexMatrix<float> m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) {
    m.real()[i] = static_cast<float>(i + 1);
    m.imag()[i] = -static_cast<float>(i + 1);
  }
  return m;
}

}  // namespace

TEST_CASE("interleaved to planar") {
  const std::vector<int> data{1, 2, 3, 4};
  const auto m = interleaved_to_planar<int>(data, 1, 2);
  CHECK(std::vector<int>(m.real().begin(), m.real().end()) == std::vector<int>{1, 3});
  CHECK(std::vector<int>(m.imag().begin(), m.imag().end()) == std::vector<int>{2, 4});
  CHECK(planar_to_interleaved(m) == data);

  const auto empty = interleaved_to_planar<float>({}, 0, 0);
  CHECK(empty.real().empty());
  CHECK(empty.imag().empty());

  CHECK_THROWS_AS((void)interleaved_to_planar<int>(data, 2, 2), ShapeError);
}

TEST_CASE("random 17x13 interleaved round trip") {
  std::mt19937 rng(4);
  std::uniform_real_distribution<float> d(-5, 5);
  std::vector<float> data(17 * 13 * 2);
  for (auto& v : data) v = d(rng);
  CHECK(planar_to_interleaved(interleaved_to_planar<float>(data, 17, 13)) == data);
}

TEST_CASE("2x2 matrix in 2x2 tiles is a single identical tile") {
  const auto m = counting(2, 2);
  const auto t = tile(m, 2, 2);
  CHECK(t.tiles_down() == 1);
  CHECK(t.tiles_across() == 1);
  CHECK(std::equal(m.real().begin(), m.real().end(), t.real().begin()));
  CHECK(std::equal(m.imag().begin(), m.imag().end(), t.imag().begin()));
}

TEST_CASE("3x3 matrix in 2x2 tiles has 4 tiles and 7 padding elements") {
  const auto m = counting(3, 3);
  const auto t = tile(m, 2, 2);
  CHECK(t.tiles_down() == 2);
  CHECK(t.tiles_across() == 2);
  CHECK(t.real().size() == 16);
  CHECK(t.real().size() - m.size() == 7);
  std::size_t zeros = 0;
  for (float v : t.real()) zeros += v == 0.0f;
  CHECK(zeros == 7);
  // tile (0,1) holds column 2 of rows 0..1, then padding
  const float* t01 = t.tile_real(0, 1);
  CHECK(t01[0] == 3.0f);
  CHECK(t01[1] == 0.0f);
  CHECK(t01[2] == 6.0f);
  CHECK(t01[3] == 0.0f);
  CHECK(detile(t) == m);
}

TEST_CASE("128x64 in 32x16 tiles round-trips") {
  std::mt19937 rng(6);
  const auto m = support::make_half(128, 64, rng);
  CHECK(detile(tile(m, 32, 16)) == m);
}

TEST_CASE("tile/detile round trip over random shapes") {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t rows = 1 + rng() % 60, cols = 1 + rng() % 60;
    const auto m = support::make_half(rows, cols, rng);
    const auto t = tile(m, 1 + rng() % 16, 1 + rng() % 16);
    REQUIRE(detile(t) == m);
    for (std::size_t r = 0; r < t.padded_rows(); ++r) {
      for (std::size_t c = 0; c < t.padded_cols(); ++c) {
        if (r < rows && c < cols) continue;
        REQUIRE(t.re(r, c).bits == 0);
        REQUIRE(t.im(r, c).bits == 0);
      }
    }
  }
}

TEST_CASE("widening while tiling") {
  std::mt19937 rng(10);
  const auto m = support::make_half(9, 11, rng);
  const auto t = tile_as<float>(m, 4, 4);
  for (std::size_t r = 0; r < 9; ++r) {
    for (std::size_t c = 0; c < 11; ++c) {
      REQUIRE(t.re(r, c) == m.re(r, c).to_float());
      REQUIRE(t.im(r, c) == m.im(r, c).to_float());
    }
  }
}

TEST_CASE("bit tiles") {
  std::mt19937 rng(12);
  SUBCASE("round trip and zero padding") {
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t rows = 1 + rng() % 40, cols = 1 + rng() % 300;
      const auto m = support::make_bits(rows, cols, rng);
      const auto t = tile(m, 1 + rng() % 8, 32 * (1 + rng() % 4));
      REQUIRE(detile(t) == m);
      for (std::size_t r = 0; r < t.real.padded_rows(); ++r) {
        for (std::size_t c = 0; c < t.real.padded_cols(); ++c) {
          const bool inside = r < rows && c < cols;
          REQUIRE(t.real.bit(r, c) == (inside && m.real.bit(r, c)));
          REQUIRE(t.imag.bit(r, c) == (inside && m.imag.bit(r, c)));
        }
      }
    }
  }
  SUBCASE("tile width must be whole words") {
    const auto m = support::make_bits(2, 40, rng);
    CHECK_THROWS_AS((void)tile(m.real, 2, 48), ShapeError);
    CHECK_THROWS_AS((void)tile(m.real, 0, 32), ShapeError);
  }
}

TEST_CASE("transpose") {
  std::mt19937 rng(14);
  const auto m = support::make_half(45, 70, rng);
  const auto t = transpose(m);
  REQUIRE(t.rows() == 70);
  for (std::size_t r = 0; r < 45; ++r) {
    for (std::size_t c = 0; c < 70; ++c) REQUIRE(t.re(c, r) == m.re(r, c));
  }
  CHECK(transpose(t) == m);
}
