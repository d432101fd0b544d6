#include "rpbf/tuner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "rpbf/cgemm.hpp"
#include "rpbf/metrics.hpp"
#include "rpbf/reference.hpp"
#include "rpbf/synthetic.hpp"

namespace rpbf {

namespace {

template <typename T>
T median(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : (v[mid - 1] + v[mid]) / 2;
}

ComplexMatrix<Half> leading(const ComplexMatrix<Half>& src, std::size_t rows, std::size_t cols) {
  ComplexMatrix<Half> out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      out.re(r, c) = src.re(r, c);
      out.im(r, c) = src.im(r, c);
    }
  }
  return out;
}

PackedComplex leading(const PackedComplex& src, std::size_t rows, std::size_t cols) {
  PackedComplex out{PackedBitMatrix(rows, cols), PackedBitMatrix(rows, cols)};
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      out.real.set_bit(r, c, src.real.bit(r, c));
      out.imag.set_bit(r, c, src.imag.bit(r, c));
    }
  }
  return out;
}

// Sub-problem dimensions are odd so that every tiling pads.
constexpr std::size_t kCheckM = 37, kCheckN = 29, kCheckK = 333;

}  // namespace

SearchBounds SearchBounds::default_for(Precision precision) {
  if (precision == Precision::half) {
    return SearchBounds{{32, 64, 128}, {16, 32, 64}, {32, 64, 128}, {16, 32, 64}, {128, 256, 512}, {1}};
  }
  return SearchBounds{{16, 32, 64}, {8, 16, 32}, {16, 32, 64}, {8, 16, 32}, {512, 1024, 2048}, {1}};
}

std::vector<TileConfig> enumerate_search_space(const SearchBounds& b, Precision precision) {
  std::vector<TileConfig> out;
  for (auto mo : b.m_outer)
    for (auto mi : b.m_inner)
      for (auto no : b.n_outer)
        for (auto ni : b.n_inner)
          for (auto kb : b.k_block)
            for (auto buf : b.buffers) {
              TileConfig c{mo, mi, no, ni, kb, buf};
              if (c.check(precision).empty()) out.push_back(c);
            }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) throw std::invalid_argument("enumerate_search_space: no valid tile configuration within bounds");
  return out;
}

RaplEnergy::RaplEnergy(std::filesystem::path counter) : counter_(std::move(counter)) {}

bool RaplEnergy::available() const {
  std::ifstream is(counter_);
  std::uint64_t v = 0;
  return static_cast<bool>(is >> v);
}

std::optional<double> RaplEnergy::read_joules() {
  std::ifstream is(counter_);
  std::uint64_t microjoules = 0;
  if (!(is >> microjoules)) return std::nullopt;
  return static_cast<double>(microjoules) * 1e-6;
}

WallClockMeter::WallClockMeter(EnergySource* energy, int warmups, int repeats)
    : energy_(energy), warmups_(warmups), repeats_(repeats) {
  if (warmups < 0 || repeats < 1) throw std::invalid_argument("WallClockMeter: need warmups >= 0, repeats >= 1");
}

MeterReading WallClockMeter::measure(const TileConfig&, const std::function<void()>& run) {
  for (int i = 0; i < warmups_; ++i) run();
  std::vector<double> times;
  std::vector<double> energies;
  for (int i = 0; i < repeats_; ++i) {
    std::optional<double> e0, e1;
    if (energy_) e0 = energy_->read_joules();
    const auto t0 = std::chrono::steady_clock::now();
    run();
    const auto t1 = std::chrono::steady_clock::now();
    if (energy_) e1 = energy_->read_joules();
    const double dt = std::chrono::duration<double>(t1 - t0).count();
    if (!(dt > 0.0)) throw std::runtime_error("WallClockMeter: non-positive elapsed time");
    times.push_back(dt);
    // counter wrap-around shows up as a negative delta; drop those samples
    if (e0.has_value() && e1.has_value() && e1.value() >= e0.value()) energies.push_back(e1.value() - e0.value());
  }
  MeterReading r;
  r.seconds = median(times);
  if (energies.size() == times.size()) r.joules = median(energies);
  return r;
}

std::optional<double> MeasurementSample::ops_per_joule() const {
  if (!joules || *joules <= 0.0) return std::nullopt;
  return static_cast<double>(ops) / *joules;
}

std::size_t select_best(std::span<const MeasurementSample> samples) {
  if (samples.empty()) throw std::invalid_argument("select_best: no samples");
  auto better = [](const MeasurementSample& x, const MeasurementSample& y) {
    if (x.ops_per_second() != y.ops_per_second()) return x.ops_per_second() > y.ops_per_second();
    const auto ex = x.ops_per_joule(), ey = y.ops_per_joule();
    if (ex.has_value() != ey.has_value()) return ex.has_value();
    if (ex && *ex != *ey) return *ex > *ey;
    return x.config < y.config;
  };
  std::size_t best = 0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (better(samples[i], samples[best])) best = i;
  }
  return best;
}

TuneResult tune(const GemmProblem& problem, std::span<const TileConfig> space, Meter& meter,
                const TuneOptions& options) {
  problem.validate();
  if (space.empty()) throw std::invalid_argument("tune: empty search space");

  std::vector<TileConfig> configs(space.begin(), space.end());
  const TileConfig fallback = default_tile_config(problem.precision);
  if (options.include_default && std::find(configs.begin(), configs.end(), fallback) == configs.end()) {
    configs.push_back(fallback);
  }

  std::mt19937_64 rng(options.seed);
  const std::uint64_t ops = useful_ops(problem);
  TuneResult result;

  if (problem.precision == Precision::half) {
    std::vector<ComplexMatrix<Half>> a, b;
    for (std::size_t i = 0; i < problem.batch; ++i) {
      a.push_back(random_half_matrix(problem.m, problem.k, rng));
      b.push_back(random_half_matrix(problem.k, problem.n, rng));
    }
    const auto sub_a = leading(a.front(), std::min(problem.m, kCheckM), std::min(problem.k, kCheckK));
    const auto sub_b = leading(b.front(), std::min(problem.k, kCheckK), std::min(problem.n, kCheckN));
    const auto expected = oracle_cgemm_double(sub_a, sub_b);
    const double tolerance = std::ldexp(1.0, -10) * std::sqrt(static_cast<double>(sub_a.cols()));

    for (const auto& cfg : configs) {
      if (!cfg.check(Precision::half).empty() ||
          relative_frobenius_error(gemm_half(sub_a, sub_b, cfg), expected) > tolerance) {
        result.rejected.push_back(cfg);
        continue;
      }
      const auto reading = meter.measure(cfg, [&] { (void)gemm_half(a, b, cfg); });
      if (!(reading.seconds > 0.0)) throw std::runtime_error("tune: meter returned a non-positive time");
      result.samples.push_back(MeasurementSample{cfg, reading.seconds, ops, reading.joules});
    }
  } else {
    std::vector<PackedComplex> a, b;
    for (std::size_t i = 0; i < problem.batch; ++i) {
      a.push_back(random_bit_matrix(problem.m, problem.k, rng));
      b.push_back(random_bit_matrix(problem.n, problem.k, rng));
    }
    const std::size_t kk = std::min(problem.k, kCheckK);
    const auto sub_a = leading(a.front(), std::min(problem.m, kCheckM), kk);
    const auto sub_b = leading(b.front(), std::min(problem.n, kCheckN), kk);
    const auto expected = oracle_cgemm_onebit(sub_a, sub_b);

    for (const auto& cfg : configs) {
      if (!cfg.check(Precision::one_bit).empty()) {
        result.rejected.push_back(cfg);
        continue;
      }
      const auto got = gemm_onebit(std::span(&sub_a, 1), std::span(&sub_b, 1), problem.bit_op, cfg);
      if (got.front() != expected) {
        result.rejected.push_back(cfg);
        continue;
      }
      const auto reading = meter.measure(cfg, [&] { (void)gemm_onebit(a, b, problem.bit_op, cfg); });
      if (!(reading.seconds > 0.0)) throw std::runtime_error("tune: meter returned a non-positive time");
      result.samples.push_back(MeasurementSample{cfg, reading.seconds, ops, reading.joules});
    }
  }

  if (result.samples.empty()) throw std::runtime_error("tune: every configuration failed validation");
  result.best = result.samples[select_best(result.samples)].config;
  return result;
}

}  // namespace rpbf
