#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "rpbf/reference.hpp"
#include "support.hpp"

using namespace rpbf;

TEST_CASE("double oracle: 1x1 product") {
  ComplexMatrix<double> a(1, 1), b(1, 1);
  a.re(0, 0) = 1;
  a.im(0, 0) = 2;
  b.re(0, 0) = 3;
  b.im(0, 0) = 4;
  const auto c = oracle_cgemm_double(a, b);
  CHECK(c.re(0, 0) == -5.0);
  CHECK(c.im(0, 0) == 10.0);
}

TEST_CASE("double oracle: zero a gives zero") {
  std::mt19937 rng(1);
  const ComplexMatrix<Half> a(5, 6);
  const auto c = oracle_cgemm_double(a, support::make_half(6, 4, rng));
  for (double v : c.real()) CHECK(v == 0.0);
  for (double v : c.imag()) CHECK(v == 0.0);
}

TEST_CASE("double oracle: 8x8x8 agrees with reversed summation") {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> d(-1, 1);
  ComplexMatrix<double> a(8, 8), b(8, 8);
  for (auto* m : {&a, &b}) {
    for (auto& v : m->real()) v = d(rng);
    for (auto& v : m->imag()) v = d(rng);
  }
  const auto c = oracle_cgemm_double(a, b);
  const auto r = support::brute_reversed(a, b);
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(std::fabs(c.real()[i] - r.real()[i]) <= 1e-12);
    CHECK(std::fabs(c.imag()[i] - r.imag()[i]) <= 1e-12);
  }
}

TEST_CASE("1-bit oracle: sign vectors with imaginary parts +1 give (-4, 0)") {
  // A = (1,-1,1,-1) + i, B = (1,1,-1,-1) + i
  PackedComplex a{PackedBitMatrix(1, 4), PackedBitMatrix(1, 4)};
  PackedComplex b{PackedBitMatrix(1, 4), PackedBitMatrix(1, 4)};
  const int ar[] = {1, -1, 1, -1}, br[] = {1, 1, -1, -1};
  for (std::size_t k = 0; k < 4; ++k) {
    a.real.set_bit(0, k, ar[k] > 0);
    b.real.set_bit(0, k, br[k] > 0);
    a.imag.set_bit(0, k, true);
    b.imag.set_bit(0, k, true);
  }
  const auto c = oracle_cgemm_onebit(a, b);
  CHECK(c.re(0, 0) == -4);
  CHECK(c.im(0, 0) == 0);
}

TEST_CASE("1-bit oracle: (1+i)(1+i) = 2i") {
  PackedComplex a{PackedBitMatrix(1, 1), PackedBitMatrix(1, 1)};
  a.real.set_bit(0, 0, true);
  a.imag.set_bit(0, 0, true);
  const auto c = oracle_cgemm_onebit(a, a);
  CHECK(c.re(0, 0) == 0);
  CHECK(c.im(0, 0) == 2);
}

TEST_CASE("1-bit oracle: K=37 equals the double oracle on the +-1 expansion") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = support::make_bits(6, 37, rng);
    const auto bt = support::make_bits(5, 37, rng);
    const auto c = oracle_cgemm_onebit(a, bt);
    ComplexMatrix<double> ea(6, 37), eb(37, 5);
    for (std::size_t r = 0; r < 6; ++r) {
      for (std::size_t k = 0; k < 37; ++k) {
        ea.re(r, k) = support::sign_at(a.real, r, k);
        ea.im(r, k) = support::sign_at(a.imag, r, k);
      }
    }
    for (std::size_t j = 0; j < 5; ++j) {
      for (std::size_t k = 0; k < 37; ++k) {
        eb.re(k, j) = support::sign_at(bt.real, j, k);
        eb.im(k, j) = support::sign_at(bt.imag, j, k);
      }
    }
    const auto d = oracle_cgemm_double(ea, eb);
    for (std::size_t i = 0; i < c.size(); ++i) {
      REQUIRE(static_cast<double>(c.real()[i]) == d.real()[i]);
      REQUIRE(static_cast<double>(c.imag()[i]) == d.imag()[i]);
    }
    REQUIRE(c == support::brute_onebit(a, bt));
  }
}

TEST_CASE("relative Frobenius error") {
  ComplexMatrix<float> x(1, 2);
  ComplexMatrix<double> ref(1, 2);
  ref.re(0, 0) = 3;
  ref.im(0, 1) = 4;
  x.re(0, 0) = 3;
  x.im(0, 1) = 4;
  CHECK(relative_frobenius_error(x, ref) == 0.0);
  x.re(0, 0) = 0;
  CHECK(relative_frobenius_error(x, ref) == doctest::Approx(0.6));
  const ComplexMatrix<double> zero(1, 2);
  CHECK(relative_frobenius_error(x, zero) == doctest::Approx(4.0));
}
