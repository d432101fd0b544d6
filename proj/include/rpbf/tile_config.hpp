#pragma once

#include <cstddef>
#include <string>

#include "rpbf/problem.hpp"

namespace rpbf {

/// Register micro-tile of the half engine (rows x float lanes).
inline constexpr std::size_t kHalfMicroRows = 4;
inline constexpr std::size_t kHalfMicroCols = 16;
/// Register micro-tile of the 1-bit engine (output rows x output cols).
inline constexpr std::size_t kBitMicroRows = 2;
inline constexpr std::size_t kBitMicroCols = 2;
/// The 1-bit engine reads 64-bit words, so k_block is a multiple of this.
inline constexpr std::size_t kBitKGranule = 64;

/// Blocking parameters of the GEMM engines.
///
/// m_outer x n_outer is the output block owned by one thread at a time;
/// m_inner x n_inner is the sub-block swept while the A and B tiles are hot
/// in L1. k_block is the reduction depth of one tile (elements for half,
/// bits for one_bit). buffers is the staging depth; the CPU engines accept
/// it but have no asynchronous copy stage.
struct TileConfig {
  std::size_t m_outer = 64;
  std::size_t m_inner = 32;
  std::size_t n_outer = 64;
  std::size_t n_inner = 32;
  std::size_t k_block = 256;
  std::size_t buffers = 1;

  /// Empty string if valid for `precision`, otherwise the first violation.
  std::string check(Precision precision) const;
  /// Throws std::invalid_argument if check() fails.
  void validate(Precision precision) const;

  std::string to_string() const;

  auto operator<=>(const TileConfig&) const = default;
};

/// Shipped defaults, used when no tuned entry exists.
TileConfig default_tile_config(Precision precision) noexcept;

}  // namespace rpbf
