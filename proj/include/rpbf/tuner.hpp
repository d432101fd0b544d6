#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rpbf/problem.hpp"
#include "rpbf/tile_config.hpp"

namespace rpbf {

/// Candidate values per tile parameter. The search space is the cartesian
/// product filtered by TileConfig::check.
struct SearchBounds {
  std::vector<std::size_t> m_outer;
  std::vector<std::size_t> m_inner;
  std::vector<std::size_t> n_outer;
  std::vector<std::size_t> n_inner;
  std::vector<std::size_t> k_block;
  std::vector<std::size_t> buffers{1};

  static SearchBounds default_for(Precision precision);
};

/// All valid configs in lexicographic (m_outer, m_inner, n_outer, n_inner,
/// k_block, buffers) order. Throws std::invalid_argument if none are valid.
std::vector<TileConfig> enumerate_search_space(const SearchBounds& bounds, Precision precision);

struct MeterReading {
  double seconds = 0.0;
  std::optional<double> joules;
};

class Meter {
 public:
  virtual ~Meter() = default;
  /// Measures `run` for `config`. Implementations may skip calling `run`
  /// (test doubles do).
  virtual MeterReading measure(const TileConfig& config, const std::function<void()>& run) = 0;
};

/// Cumulative energy counter, in joules.
class EnergySource {
 public:
  virtual ~EnergySource() = default;
  virtual std::optional<double> read_joules() = 0;
};

/// Linux powercap (RAPL) package counter. available() is false when the
/// sysfs file is missing or unreadable.
class RaplEnergy final : public EnergySource {
 public:
  explicit RaplEnergy(std::filesystem::path counter = "/sys/class/powercap/intel-rapl:0/energy_uj");
  bool available() const;
  std::optional<double> read_joules() override;

 private:
  std::filesystem::path counter_;
};

/// Warm-up run, then the median of `repeats` timed runs.
class WallClockMeter final : public Meter {
 public:
  explicit WallClockMeter(EnergySource* energy = nullptr, int warmups = 1, int repeats = 5);
  MeterReading measure(const TileConfig& config, const std::function<void()>& run) override;

 private:
  EnergySource* energy_;
  int warmups_;
  int repeats_;
};

struct MeasurementSample {
  TileConfig config;
  double seconds = 0.0;
  std::uint64_t ops = 0;
  std::optional<double> joules;

  double ops_per_second() const { return static_cast<double>(ops) / seconds; }
  std::optional<double> ops_per_joule() const;
};

/// Index of the best sample: highest ops/s, then highest ops/J (a sample
/// with energy beats one without), then the lexicographically smallest
/// config.
std::size_t select_best(std::span<const MeasurementSample> samples);

struct TuneOptions {
  std::uint64_t seed = 1;
  /// Always measure the shipped default alongside the search space.
  bool include_default = true;
};

struct TuneResult {
  TileConfig best;
  std::vector<MeasurementSample> samples;
  std::vector<TileConfig> rejected;  // failed oracle validation
};

/// Measures every config in `space` on seeded synthetic data for `problem`.
/// Each config is first checked against the oracle on a small sub-problem.
TuneResult tune(const GemmProblem& problem, std::span<const TileConfig> space, Meter& meter,
                const TuneOptions& options = {});

/// Powers of two at or above each dimension, e.g. "1024x1024x1024".
std::string shape_class(const GemmProblem& problem);

/// CPU model + logical cores + total memory, with whitespace replaced.
std::string machine_fingerprint();

struct TunedKey {
  std::string fingerprint;
  Precision precision = Precision::half;
  std::string shape;

  auto operator<=>(const TunedKey&) const = default;
};

/// Tuned configs keyed by machine, precision and shape class. Text format,
/// one record per line:
///   fingerprint=<fp> precision=<f16|b1> shape=<MxNxK> m_outer=.. m_inner=..
///   n_outer=.. n_inner=.. k_block=.. buffers=..
/// Lines starting with '#' are comments.
class TunedStore {
 public:
  void put(const TunedKey& key, const TileConfig& config);
  std::optional<TileConfig> find(const TunedKey& key) const;
  /// Tuned entry for this machine and shape class, else the shipped default.
  TileConfig lookup(const std::string& fingerprint, const GemmProblem& problem) const;

  std::size_t size() const noexcept { return entries_.size(); }
  const std::map<TunedKey, TileConfig>& entries() const noexcept { return entries_; }

  void save(std::ostream& os) const;
  void save(const std::filesystem::path& path) const;
  /// A malformed store yields an empty store (so lookups return defaults)
  /// and a message in `warnings`.
  static TunedStore parse(std::istream& is, std::vector<std::string>* warnings = nullptr);
  static TunedStore load(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

  friend bool operator==(const TunedStore&, const TunedStore&) = default;

 private:
  std::map<TunedKey, TileConfig> entries_;
};

}  // namespace rpbf
