#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>
#include <limits>
#include <random>

#include "rpbf/cgemm.hpp"
#include "rpbf/errors.hpp"
#include "rpbf/quantpack.hpp"
#include "support.hpp"

using namespace rpbf;

namespace {

ComplexMatrix<float> row_of(std::initializer_list<float> re, std::initializer_list<float> im) {
  ComplexMatrix<float> m(1, re.size());
  std::copy(re.begin(), re.end(), m.real().begin());
  std::copy(im.begin(), im.end(), m.imag().begin());
  return m;
}

}  // namespace

TEST_CASE("signs 1,-1,1,-1 pack to 1010 read from the first element") {
  const auto p = quantize_to_bits(row_of({1.0f, -1.0f, 1.0f, -1.0f}, {1, 1, 1, 1}));
  CHECK(p.real.words_per_row() == 1);
  CHECK(p.real.words()[0] == 0b0101u);
  CHECK(p.imag.words()[0] == 0b1111u);
}

TEST_CASE("all-positive plane of 32 fills one word") {
  ComplexMatrix<float> m(1, 32);
  std::fill(m.real().begin(), m.real().end(), 0.5f);
  const auto p = quantize_to_bits(m);
  REQUIRE(p.real.words().size() == 1);
  CHECK(p.real.words()[0] == 0xFFFFFFFFu);
  CHECK(p.imag.words()[0] == 0xFFFFFFFFu);  // zeros quantize to +1
}

TEST_CASE("gaussian vector matches a scalar sign loop") {
  std::mt19937 rng(3);
  std::normal_distribution<float> g;
  ComplexMatrix<float> m(1, 100);
  for (auto& v : m.real()) v = g(rng);
  for (auto& v : m.imag()) v = g(rng);
  const auto p = quantize_to_bits(m);
  for (std::size_t c = 0; c < 100; ++c) {
    CHECK(support::sign_at(p.real, 0, c) == (m.re(0, c) >= 0.0f ? 1 : -1));
    CHECK(support::sign_at(p.imag, 0, c) == (m.im(0, c) >= 0.0f ? 1 : -1));
  }
  CHECK(p.real.padding_clear());
  CHECK(p.imag.padding_clear());
}

TEST_CASE("signed zeros quantize to +1") {
  const auto p = quantize_to_bits(row_of({0.0f, -0.0f}, {-0.0f, 0.0f}));
  CHECK(p.real.words()[0] == 0b11u);
  CHECK(p.imag.words()[0] == 0b11u);
}

TEST_CASE("non-finite input is rejected with its position") {
  auto m = row_of({1.0f, 2.0f, 3.0f}, {0.0f, 0.0f, std::numeric_limits<float>::infinity()});
  try {
    (void)quantize_to_bits(m);
    FAIL("expected NonFiniteError");
  } catch (const NonFiniteError& e) {
    CHECK(e.plane() == 'i');
    CHECK(e.row() == 0);
    CHECK(e.col() == 2);
  }
  m.re(0, 1) = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS((void)quantize_to_bits_transposed(m), NonFiniteError);
}

TEST_CASE("pack_bits") {
  SUBCASE("1,0,1,0 with width 4 is the word 5") {
    const std::vector<std::uint8_t> bits{1, 0, 1, 0};
    const auto p = pack_bits(bits, 4);
    REQUIRE(p.words().size() == 1);
    CHECK(p.words()[0] == 5u);
  }
  SUBCASE("empty row has no words") {
    CHECK(pack_bits({}, 4).words().empty());
    CHECK(PackedBitMatrix(1, 0).words().empty());
  }
  SUBCASE("33 bits take two words, the second holding one bit") {
    std::vector<std::uint8_t> bits(33, 1);
    const auto p = pack_bits(bits, 33);
    REQUIRE(p.words_per_row() == 2);
    CHECK(p.words()[0] == 0xFFFFFFFFu);
    CHECK(p.words()[1] == 1u);
    CHECK(p.padding_clear());
  }
  SUBCASE("bad widths") {
    const std::vector<std::uint8_t> bits(10, 0);
    CHECK_THROWS_AS((void)pack_bits(bits, 0), std::invalid_argument);
    CHECK_THROWS_AS((void)pack_bits(bits, 3), ShapeError);
  }
}

TEST_CASE("unpack_bits") {
  SUBCASE("word 0b1100 is -1,-1,+1,+1") {
    PackedBitMatrix m(1, 4);
    m.words()[0] = 0b1100u;
    CHECK(unpack_bits(m) == std::vector<std::int8_t>{-1, -1, 1, 1});
  }
  SUBCASE("all-zero word is all -1") {
    PackedBitMatrix m(1, 32);
    CHECK(unpack_bits(m) == std::vector<std::int8_t>(32, -1));
  }
  SUBCASE("random 1000-bit pattern matches a bit test") {
    std::mt19937 rng(11);
    std::vector<std::uint8_t> bits(1000);
    for (auto& b : bits) b = rng() & 1u;
    const auto p = pack_bits(bits, 1000);
    const auto values = unpack_bits(p);
    for (std::size_t i = 0; i < bits.size(); ++i) {
      const bool set = (p.words()[i / 32] >> (i % 32)) & 1u;
      REQUIRE(set == (bits[i] != 0));
      REQUIRE(values[i] == (bits[i] ? 1 : -1));
    }
  }
}

TEST_CASE("pack then unpack is the identity over random shapes") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t rows = 1 + rng() % 20, width = 1 + rng() % 200;
    std::vector<std::uint8_t> bits(rows * width);
    for (auto& b : bits) b = rng() & 1u;
    const auto values = unpack_bits(pack_bits(bits, width));
    for (std::size_t i = 0; i < bits.size(); ++i) REQUIRE(values[i] == (bits[i] ? 1 : -1));
  }
}

TEST_CASE("quantization is idempotent on +-1 data") {
  std::mt19937 rng(9);
  const auto bits = support::make_bits(7, 45, rng);
  CHECK(quantize_to_bits(unpack_complex(bits)) == bits);
}

TEST_CASE("transposed quantization packs columns") {
  std::mt19937 rng(13);
  std::normal_distribution<double> g;
  ComplexMatrix<double> m(37, 5);
  for (auto& v : m.real()) v = g(rng);
  for (auto& v : m.imag()) v = g(rng);
  const auto t = quantize_to_bits_transposed(m);
  REQUIRE(t.rows() == 5);
  REQUIRE(t.cols() == 37);
  for (std::size_t r = 0; r < 37; ++r) {
    for (std::size_t c = 0; c < 5; ++c) {
      CHECK(support::sign_at(t.real, c, r) == (m.re(r, c) >= 0 ? 1 : -1));
      CHECK(support::sign_at(t.imag, c, r) == (m.im(r, c) >= 0 ? 1 : -1));
    }
  }
  CHECK(t.real.padding_clear());
}

TEST_CASE("1-bit dot product: A=1010, B=1100 gives popc 2 and value 0") {
  // element order: A = (1,-1,1,-1), B = (1,1,-1,-1)
  const std::vector<std::uint8_t> a_bits{1, 0, 1, 0}, b_bits{1, 1, 0, 0};
  const auto a = pack_bits(a_bits, 4), b = pack_bits(b_bits, 4);
  CHECK(std::popcount(a.words()[0] ^ b.words()[0]) == 2);
  CHECK(onebit_dot_xor(a.words(), b.words(), 4) == 0);
  CHECK(onebit_dot_and(a.words(), b.words(), 4) == 0);
  // the same vectors written as the numeric words 0b1010 and 0b1100
  const std::uint32_t wa = 0b1010, wb = 0b1100;
  CHECK(std::popcount(wa ^ wb) == 2);
  CHECK(onebit_dot_xor(std::span(&wa, 1), std::span(&wb, 1), 4) == 0);
}

TEST_CASE("real 1-bit dot products agree with a +-1 loop") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 1 + rng() % 300;
    std::vector<std::uint8_t> x(k), y(k);
    long long expected = 0;
    for (std::size_t i = 0; i < k; ++i) {
      x[i] = rng() & 1u;
      y[i] = rng() & 1u;
      expected += (x[i] ? 1 : -1) * (y[i] ? 1 : -1);
    }
    const auto px = pack_bits(x, k), py = pack_bits(y, k);
    REQUIRE(onebit_dot_xor(px.words(), py.words(), k) == expected);
    REQUIRE(onebit_dot_and(px.words(), py.words(), k) == expected);
  }
}
