#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rpbf/beamform.hpp"
#include "rpbf/metrics.hpp"
#include "rpbf/tile_config.hpp"
#include "rpbf/tuner.hpp"

namespace rpbf::cli {

/// Process exit status, one value per failure class.
enum ExitCode : int {
  kOk = 0,
  kVerifyFailed = 1,
  kUsageError = 2,
  kIoError = 3,
  kRuntimeError = 4,
};

/// Size range "lo:hi:factor" (lo, lo*factor, ... <= hi) or "lo:hi:+step"
/// (lo, lo+step, ...).
struct Sweep {
  std::size_t lo = 1;
  std::size_t hi = 1;
  std::size_t step = 2;
  bool additive = false;

  std::vector<std::size_t> points() const;
};

/// Throws std::invalid_argument on malformed or empty ranges.
Sweep parse_sweep(std::string_view text);

/// One problem per sweep point. Dimensions given in `fixed` stay fixed,
/// the others take the point value.
struct FixedDims {
  std::optional<std::size_t> m, n, k;
};
std::vector<GemmProblem> sweep_problems(const Sweep& sweep, const FixedDims& fixed, std::size_t batch,
                                        Precision precision, BitOp op);

// ---------------------------------------------------------------------------
// bench

struct BenchOptions {
  std::vector<GemmProblem> problems;
  std::optional<TileConfig> tiles;  // overrides store and default
  TunedStore* store = nullptr;      // looked up per problem; --tune writes into it
  bool tune = false;
  bool verify = false;
  std::uint64_t seed = 1;
  int warmups = 1;
  int repeats = 5;
};

struct BenchPoint {
  MetricsRecord record;
  TileConfig tiles;
  std::optional<bool> verified;
  /// half: relative Frobenius error; 1-bit: number of mismatching elements.
  double error = 0.0;
};

/// Times the public GEMM entry point (operand tiling included) on seeded
/// synthetic data; warm-up plus median of `repeats`.
std::vector<BenchPoint> run_bench(const BenchOptions& options, std::ostream* log = nullptr);

/// Error bound used by --verify on the half path.
double half_tolerance(std::size_t k);

// ---------------------------------------------------------------------------
// radio-demo

struct RadioOptions {
  std::size_t stations = 48;
  std::size_t beams = 1024;
  std::size_t samples = 1024;
  std::size_t polarizations = 2;
  std::size_t channels = 8;
  std::size_t source_beam = 100;  // clamped to beams - 1
  double noise = 0.0;             // per-sensor noise standard deviation (source amplitude 1)
  std::uint64_t seed = 1;
  std::optional<TileConfig> tiles;
  bool verify = false;
  int repeats = 3;
};

struct RadioResult {
  GemmProblem problem;
  std::size_t source_beam = 0;
  std::vector<std::size_t> peak_beams;  // per batch entry
  double peak_amplitude = 0.0;          // mean |y| at the source beam, batch entry 0
  MetricsRecord record;
  std::optional<bool> verified;
  double error = 0.0;
};

/// Stations at seeded random offsets along a line of (beams / 2) wavelengths,
/// beams evenly spaced in sin(theta) at half the array resolution, one
/// injected point source on `source_beam`.
RadioResult run_radio_demo(const RadioOptions& options);

// ---------------------------------------------------------------------------
// ultrasound-demo

struct UltrasoundOptions {
  std::size_t voxels = 3888;
  std::size_t frames = 804;
  std::size_t frequencies = 8;
  std::size_t transceivers = 32;
  std::size_t transmissions = 32;
  std::uint64_t seed = 1;
  BitOp bit_op = BitOp::xor_;
  std::optional<TileConfig> tiles;
  bool verify = false;
  int repeats = 3;
  /// Overrides the available-memory probe (bytes).
  std::optional<std::size_t> memory_available;

  /// 38880 voxels, 8041 frames, 128 x 64 x 64 = 524288 measurements.
  static UltrasoundOptions full_scale();
};

struct ImageStats {
  double mean_magnitude = 0.0;
  double max_magnitude = 0.0;
  std::size_t peak_voxel = 0;  // in frame 0
};

struct UltrasoundResult {
  GemmProblem problem;
  bool executed = false;
  std::string skipped_reason;
  std::size_t bytes_required = 0;
  std::optional<std::size_t> bytes_available;
  double seconds = 0.0;  // median of the timed region
  double frames_per_second = 0.0;
  MetricsRecord record;
  ImageStats image;
  std::optional<bool> verified;
  std::size_t mismatches = 0;
};

/// Peak resident bytes of the demo for `problem`.
std::size_t ultrasound_memory_estimate(const GemmProblem& problem);
/// MemAvailable from /proc/meminfo.
std::optional<std::size_t> available_memory();

/// The model matrix (voxels x measurements) is generated packed and tiled
/// outside the timed region. The timed region covers sign-packing and
/// transposing the measurement matrix (measurements x frames), tiling it and
/// the 1-bit GEMM.
UltrasoundResult run_ultrasound_demo(const UltrasoundOptions& options);

// ---------------------------------------------------------------------------
// verify

struct VerifyOptions {
  Precision precision = Precision::one_bit;
  BitOp bit_op = BitOp::xor_;
  std::size_t cases = 100;
  std::size_t max_mn = 32;
  std::size_t max_k = 2048;
  std::uint64_t seed = 1;
  std::optional<TileConfig> tiles;
};

struct VerifyResult {
  std::size_t cases = 0;
  std::size_t failures = 0;
  double worst_error = 0.0;  // half: relative error; 1-bit: mismatching elements
};

/// Random shapes (batch 1 or 3) checked against the oracle.
VerifyResult run_verify(const VerifyOptions& options);

// ---------------------------------------------------------------------------

/// Full command-line entry point. Returns an ExitCode.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rpbf::cli
