#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rpbf/problem.hpp"

namespace rpbf {

/// Useful operations of a complex GEMM: 8 * batch * M * N * K
/// (four real FMAs per complex multiply-add, two ops per FMA).
std::uint64_t useful_ops(const GemmProblem& p);

/// Minimum bytes moved: both input planes read once, both output planes
/// written once. Padding is not counted.
///   half:    batch * (2*2*(M*K + K*N) + 2*4*M*N)
///   one_bit: batch * (2*(M*K + K*N)/8 + 2*4*M*N)
std::uint64_t bytes_model(const GemmProblem& p);

struct MetricsRecord {
  GemmProblem problem;
  std::uint64_t ops = 0;
  std::uint64_t bytes = 0;
  double seconds = 0.0;
  std::optional<double> joules;

  static MetricsRecord from_run(const GemmProblem& p, double seconds, std::optional<double> joules = std::nullopt);

  double arithmetic_intensity() const { return static_cast<double>(ops) / static_cast<double>(bytes); }
  double ops_per_second() const { return static_cast<double>(ops) / seconds; }
  std::optional<double> ops_per_joule() const;
};

/// Measured machine limits in useful ops/s and bytes/s.
struct MachineCeiling {
  double peak_compute_half = 0.0;
  double peak_compute_onebit = 0.0;
  double peak_bandwidth = 0.0;

  double peak_compute(Precision p) const { return p == Precision::half ? peak_compute_half : peak_compute_onebit; }
  double ridge_point(Precision p) const { return peak_compute(p) / peak_bandwidth; }
  /// min(peak_compute, ai * peak_bandwidth)
  double attainable(Precision p, double ai) const;
};

struct CeilingOptions {
  double min_seconds = 0.2;  // per trial
  int trials = 5;            // best-of
  std::size_t stream_bytes = std::size_t{128} << 20;
};

/// Compute ceilings come from the engines' own micro-kernels run on
/// L1-resident operands; bandwidth from a large streaming copy.
MachineCeiling measure_ceilings(const CeilingOptions& options = {});

enum class Bound { memory, compute };
std::string_view to_string(Bound b) noexcept;

struct ReportRow {
  MetricsRecord record;
  std::optional<double> attainable;
  std::optional<Bound> bound;

  double achieved() const { return record.ops_per_second(); }
};

/// Classifies each sample against the ridge point of its precision.
std::vector<ReportRow> roofline_report(std::span<const MetricsRecord> samples, const MachineCeiling& ceiling);
std::vector<ReportRow> unclassified_rows(std::span<const MetricsRecord> samples);

/// Column order of the CSV output and keys of the JSON output.
inline constexpr const char* kReportColumns[] = {"precision", "batch", "M",         "N",      "K",
                                                 "ops",       "bytes", "ai",        "seconds", "ops_per_s",
                                                 "joules",    "ops_per_j", "bound"};

void write_csv(std::ostream& os, std::span<const ReportRow> rows);
void write_json(std::ostream& os, std::span<const ReportRow> rows);

}  // namespace rpbf
