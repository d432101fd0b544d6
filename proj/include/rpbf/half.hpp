#pragma once

#include <bit>
#include <cmath>
#include <cstdint>

namespace rpbf {

/// IEEE 754 binary16 storage type. Arithmetic is never done in half; values
/// are widened to float before use.
struct Half {
  std::uint16_t bits = 0;

  Half() = default;
  static constexpr Half from_bits(std::uint16_t b) {
    Half h;
    h.bits = b;
    return h;
  }

  /// Round-to-nearest-even conversion. Overflow saturates to infinity.
  static Half from_float(float value) noexcept;
  float to_float() const noexcept;

  bool is_finite() const noexcept { return (bits & 0x7c00u) != 0x7c00u; }

  friend bool operator==(Half, Half) = default;
};

inline Half Half::from_float(float value) noexcept {
  const std::uint32_t x = std::bit_cast<std::uint32_t>(value);
  const std::uint32_t sign = (x >> 16) & 0x8000u;
  const std::uint32_t exponent = (x >> 23) & 0xffu;
  std::uint32_t mantissa = x & 0x7fffffu;

  if (exponent == 0xffu) {
    // inf stays inf, NaN stays a quiet NaN
    const std::uint32_t payload = mantissa != 0 ? (0x200u | (mantissa >> 13)) : 0u;
    return from_bits(static_cast<std::uint16_t>(sign | 0x7c00u | payload));
  }

  const int e = static_cast<int>(exponent) - 127 + 15;
  if (e >= 31) return from_bits(static_cast<std::uint16_t>(sign | 0x7c00u));

  if (e <= 0) {
    if (e < -10) return from_bits(static_cast<std::uint16_t>(sign));
    mantissa |= 0x800000u;
    const int shift = 14 - e;
    std::uint32_t out = mantissa >> shift;
    const std::uint32_t rem = mantissa & ((1u << shift) - 1u);
    const std::uint32_t halfway = 1u << (shift - 1);
    if (rem > halfway || (rem == halfway && (out & 1u))) ++out;
    return from_bits(static_cast<std::uint16_t>(sign | out));
  }

  std::uint32_t out = sign | (static_cast<std::uint32_t>(e) << 10) | (mantissa >> 13);
  const std::uint32_t rem = mantissa & 0x1fffu;
  // a carry out of the mantissa correctly bumps the exponent (possibly to inf)
  if (rem > 0x1000u || (rem == 0x1000u && (out & 1u))) ++out;
  return from_bits(static_cast<std::uint16_t>(out));
}

inline float Half::to_float() const noexcept {
  const std::uint32_t sign = static_cast<std::uint32_t>(bits & 0x8000u) << 16;
  const std::uint32_t exponent = (bits >> 10) & 0x1fu;
  const std::uint32_t mantissa = bits & 0x3ffu;

  if (exponent == 0) {
    if (mantissa == 0) return std::bit_cast<float>(sign);
    const float magnitude = std::ldexp(static_cast<float>(mantissa), -24);
    return sign ? -magnitude : magnitude;
  }
  if (exponent == 31) return std::bit_cast<float>(sign | 0x7f800000u | (mantissa << 13));
  return std::bit_cast<float>(sign | ((exponent + 112u) << 23) | (mantissa << 13));
}

inline Half to_half(float v) noexcept { return Half::from_float(v); }
inline float to_float(Half h) noexcept { return h.to_float(); }

}  // namespace rpbf
