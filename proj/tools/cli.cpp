#include "cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "rpbf/cgemm.hpp"
#include "rpbf/errors.hpp"
#include "rpbf/matrix_io.hpp"
#include "rpbf/reference.hpp"
#include "rpbf/synthetic.hpp"

namespace rpbf::cli {

namespace {

std::size_t parse_size(std::string_view text, std::string_view what) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument(std::string(what) + ": '" + std::string(text) + "' is not a non-negative integer");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  while (true) {
    const auto pos = text.find(sep);
    parts.push_back(text.substr(0, pos));
    if (pos == std::string_view::npos) break;
    text.remove_prefix(pos + 1);
  }
  return parts;
}

std::mt19937_64 rng_for(std::uint64_t seed, const GemmProblem& p) {
  std::seed_seq seq{seed, static_cast<std::uint64_t>(p.batch), static_cast<std::uint64_t>(p.m),
                    static_cast<std::uint64_t>(p.n), static_cast<std::uint64_t>(p.k)};
  return std::mt19937_64(seq);
}

std::unique_ptr<RaplEnergy> energy_counter() {
  auto rapl = std::make_unique<RaplEnergy>();
  if (!rapl->available()) return nullptr;
  return rapl;
}

double max_error(const std::vector<ComplexMatrix<float>>& got, const std::vector<ComplexMatrix<double>>& expected) {
  double worst = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, relative_frobenius_error(got[i], expected[i]));
  return worst;
}

std::size_t mismatches(const ComplexMatrix<std::int32_t>& got, const ComplexMatrix<std::int32_t>& expected) {
  if (got.rows() != expected.rows() || got.cols() != expected.cols()) return std::numeric_limits<std::size_t>::max();
  std::size_t count = 0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    if (got.real()[i] != expected.real()[i] || got.imag()[i] != expected.imag()[i]) ++count;
  }
  return count;
}

TileConfig tiles_for(const GemmProblem& p, const std::optional<TileConfig>& override_tiles, const TunedStore* store) {
  if (override_tiles) return *override_tiles;
  if (store) return store->lookup(machine_fingerprint(), p);
  return default_tile_config(p.precision);
}

}  // namespace

std::vector<std::size_t> Sweep::points() const {
  std::vector<std::size_t> out;
  for (std::size_t v = lo; v <= hi;) {
    out.push_back(v);
    const std::size_t next = additive ? v + step : v * step;
    if (next <= v) break;
    v = next;
  }
  return out;
}

Sweep parse_sweep(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw std::invalid_argument("sweep: expected lo:hi:factor or lo:hi:+step");
  Sweep s;
  s.lo = parse_size(parts[0], "sweep lo");
  s.hi = parse_size(parts[1], "sweep hi");
  std::string_view step = parts[2];
  if (!step.empty() && step.front() == '+') {
    s.additive = true;
    step.remove_prefix(1);
  }
  s.step = parse_size(step, "sweep step");
  if (s.lo == 0) throw std::invalid_argument("sweep: lo must be >= 1");
  if (s.hi < s.lo) throw std::invalid_argument("sweep: empty range (hi < lo)");
  if (s.additive ? s.step == 0 : s.step < 2) {
    throw std::invalid_argument(s.additive ? "sweep: additive step must be >= 1" : "sweep: factor must be >= 2");
  }
  return s;
}

std::vector<GemmProblem> sweep_problems(const Sweep& sweep, const FixedDims& fixed, std::size_t batch,
                                        Precision precision, BitOp op) {
  std::vector<GemmProblem> out;
  for (std::size_t v : sweep.points()) {
    GemmProblem p;
    p.batch = batch;
    p.m = fixed.m.value_or(v);
    p.n = fixed.n.value_or(v);
    p.k = fixed.k.value_or(v);
    p.precision = precision;
    p.bit_op = op;
    p.k_pad = precision == Precision::one_bit ? packing_pad(p.k) : 0;
    p.validate();
    out.push_back(p);
  }
  return out;
}

double half_tolerance(std::size_t k) { return std::ldexp(1.0, -10) * std::sqrt(static_cast<double>(k)); }

// ---------------------------------------------------------------------------

std::vector<BenchPoint> run_bench(const BenchOptions& options, std::ostream* log) {
  auto energy = energy_counter();
  WallClockMeter meter(energy.get(), options.warmups, options.repeats);
  std::vector<BenchPoint> points;

  for (const GemmProblem& p : options.problems) {
    p.validate();
    BenchPoint point;
    point.tiles = tiles_for(p, options.tiles, options.store);

    if (options.tune) {
      const auto space = enumerate_search_space(SearchBounds::default_for(p.precision), p.precision);
      WallClockMeter tune_meter(energy.get(), 1, std::max(1, options.repeats));
      const auto tuned = tune(p, space, tune_meter, TuneOptions{options.seed, true});
      point.tiles = tuned.best;
      if (options.store) options.store->put(TunedKey{machine_fingerprint(), p.precision, shape_class(p)}, tuned.best);
    }
    point.tiles.validate(p.precision);

    auto rng = rng_for(options.seed, p);
    MeterReading reading;
    if (p.precision == Precision::half) {
      std::vector<ComplexMatrix<Half>> a, b;
      for (std::size_t i = 0; i < p.batch; ++i) {
        a.push_back(random_half_matrix(p.m, p.k, rng));
        b.push_back(random_half_matrix(p.k, p.n, rng));
      }
      std::vector<ComplexMatrix<float>> c;
      reading = meter.measure(point.tiles, [&] { c = gemm_half(a, b, point.tiles); });
      if (options.verify) {
        point.error = max_error(c, oracle_cgemm_double<Half>(a, b));
        point.verified = point.error <= half_tolerance(p.k);
      }
    } else {
      std::vector<PackedComplex> a, b;
      for (std::size_t i = 0; i < p.batch; ++i) {
        a.push_back(random_bit_matrix(p.m, p.k, rng));
        b.push_back(random_bit_matrix(p.n, p.k, rng));
      }
      std::vector<ComplexMatrix<std::int32_t>> c;
      reading = meter.measure(point.tiles, [&] { c = gemm_onebit(a, b, p.bit_op, point.tiles); });
      if (options.verify) {
        const auto expected = oracle_cgemm_onebit(a, b);
        std::size_t bad = 0;
        for (std::size_t i = 0; i < c.size(); ++i) bad += mismatches(c[i], expected[i]);
        point.error = static_cast<double>(bad);
        point.verified = bad == 0;
      }
    }
    point.record = MetricsRecord::from_run(p, reading.seconds, reading.joules);

    if (log) {
      *log << to_string(p.precision) << " batch=" << p.batch << " M=" << p.m << " N=" << p.n << " K=" << p.k
           << " tiles=" << point.tiles.to_string() << " " << point.record.ops_per_second() / 1e9 << " Gops/s";
      if (point.verified) {
        *log << (p.precision == Precision::half ? " rel_err=" : " mismatches=") << point.error
             << (*point.verified ? " verify=ok" : " verify=FAILED");
      }
      *log << '\n';
    }
    points.push_back(point);
  }
  return points;
}

// ---------------------------------------------------------------------------

RadioResult run_radio_demo(const RadioOptions& o) {
  RadioResult result;
  result.problem = map_radio_job(o.stations, o.beams, o.samples, o.polarizations, o.channels);
  const GemmProblem& p = result.problem;
  result.source_beam = std::min(o.source_beam, o.beams - 1);

  constexpr double kWaveSpeed = 299792458.0;
  constexpr double kFrequency = 150.0e6;
  const double wavelength = kWaveSpeed / kFrequency;
  const double beam_count = static_cast<double>(std::max<std::size_t>(o.beams, 2));
  const double aperture = 0.5 * beam_count * wavelength;

  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> place(0.0, aperture);
  ArrayGeometry geometry;
  geometry.wave_speed = kWaveSpeed;
  geometry.frequency = kFrequency;
  geometry.sensor_positions.resize(o.stations);
  for (std::size_t k = 1; k < o.stations; ++k) geometry.sensor_positions[k] = place(rng);

  std::vector<double> angles(o.beams);
  for (std::size_t b = 0; b < o.beams; ++b) {
    const double s = (static_cast<double>(b) - static_cast<double>(o.beams / 2)) / beam_count;
    angles[b] = std::asin(s);
  }
  const SteeringPlan plan = make_steering_weights(geometry, angles);
  const ComplexMatrix<Half> weights = convert<Half>(plan.weights);

  const double theta = angles[result.source_beam];
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> gauss(0.0, o.noise / std::numbers::sqrt2);
  std::vector<ComplexMatrix<Half>> w(p.batch, weights), x;
  for (std::size_t i = 0; i < p.batch; ++i) {
    ComplexMatrix<Half> block(o.stations, o.samples);
    for (std::size_t n = 0; n < o.samples; ++n) {
      const std::complex<double> s = std::polar(1.0, phase(rng));
      for (std::size_t k = 0; k < o.stations; ++k) {
        const double delay_phase = -2.0 * std::numbers::pi * kFrequency * arrival_delay(geometry, k, theta);
        std::complex<double> v = s * std::polar(1.0, delay_phase);
        if (o.noise > 0.0) v += std::complex<double>(gauss(rng), gauss(rng));
        block.re(k, n) = Half::from_float(static_cast<float>(v.real()));
        block.im(k, n) = Half::from_float(static_cast<float>(v.imag()));
      }
    }
    x.push_back(std::move(block));
  }

  const TileConfig tiles = o.tiles.value_or(default_tile_config(Precision::half));
  auto energy = energy_counter();
  WallClockMeter meter(energy.get(), 1, o.repeats);
  std::vector<ComplexMatrix<float>> y;
  const MeterReading reading = meter.measure(tiles, [&] { y = gemm_half(w, x, tiles); });
  result.record = MetricsRecord::from_run(p, reading.seconds, reading.joules);

  for (const auto& beams : y) {
    const auto power = beam_power(beams);
    result.peak_beams.push_back(argmax(power));
  }
  double amplitude = 0.0;
  for (std::size_t n = 0; n < o.samples; ++n) {
    amplitude += std::hypot(y.front().re(result.source_beam, n), y.front().im(result.source_beam, n));
  }
  result.peak_amplitude = amplitude / static_cast<double>(o.samples);

  if (o.verify) {
    result.error = max_error(y, oracle_cgemm_double<Half>(w, x));
    result.verified = result.error <= half_tolerance(p.k);
  }
  return result;
}

// ---------------------------------------------------------------------------

UltrasoundOptions UltrasoundOptions::full_scale() {
  UltrasoundOptions o;
  o.voxels = 38880;
  o.frames = 8041;
  o.frequencies = 128;
  o.transceivers = 64;
  o.transmissions = 64;
  return o;
}

std::size_t ultrasound_memory_estimate(const GemmProblem& p) {
  const std::size_t k_bytes = words_for_bits(p.k) * sizeof(std::uint32_t);
  const std::size_t model = 2 * p.m * k_bytes;          // packed, then tiled
  const std::size_t measurement = 2 * sizeof(float) * p.k * p.n;
  const std::size_t measurement_bits = 2 * p.n * k_bytes;  // packed, then tiled
  const std::size_t output = 2 * sizeof(std::int32_t) * p.m * p.n;
  return 2 * model + measurement + 2 * measurement_bits + output;
}

std::optional<std::size_t> available_memory() {
  std::ifstream is("/proc/meminfo");
  std::string key, unit;
  std::size_t kib = 0;
  while (is >> key >> kib >> unit) {
    if (key == "MemAvailable:") return kib * 1024;
  }
  return std::nullopt;
}

UltrasoundResult run_ultrasound_demo(const UltrasoundOptions& o) {
  UltrasoundResult result;
  result.problem = map_ultrasound_job(o.voxels, o.frames, o.frequencies, o.transceivers, o.transmissions);
  result.problem.bit_op = o.bit_op;
  const GemmProblem& p = result.problem;
  if (p.k + p.k_pad >= kMaxOneBitK) throw std::invalid_argument("ultrasound-demo: measurement count too large");

  result.bytes_required = ultrasound_memory_estimate(p);
  result.bytes_available = o.memory_available ? o.memory_available : available_memory();
  if (result.bytes_available && result.bytes_required > *result.bytes_available) {
    std::ostringstream why;
    why << "needs about " << result.bytes_required / (1u << 20) << " MiB but only "
        << *result.bytes_available / (1u << 20) << " MiB are available";
    result.skipped_reason = why.str();
    return result;
  }

  const TileConfig tiles = o.tiles.value_or(default_tile_config(Precision::one_bit));
  tiles.validate(Precision::one_bit);
  std::mt19937_64 rng(o.seed);

  // Model matrix: prepared once, outside the timed region.
  PackedComplex model = random_bit_matrix(p.m, p.k, rng);
  const TiledComplexBits model_tiled = prepare_onebit(model, tiles.m_outer, tiles);
  if (!o.verify) model = PackedComplex{};

  std::normal_distribution<float> gauss(0.0f, 1.0f);
  ComplexMatrix<float> measurement(p.k, p.n);
  for (auto& v : measurement.real()) v = gauss(rng);
  for (auto& v : measurement.imag()) v = gauss(rng);

  auto energy = energy_counter();
  WallClockMeter meter(energy.get(), 1, o.repeats);
  ComplexMatrix<std::int32_t> image;
  const MeterReading reading = meter.measure(tiles, [&] {
    const PackedComplex packed = quantize_to_bits_transposed(measurement);
    const TiledComplexBits packed_tiled = prepare_onebit(packed, tiles.n_outer, tiles);
    image = std::move(gemm_onebit_tiled(std::span(&model_tiled, 1), std::span(&packed_tiled, 1), p.bit_op, tiles)
                          .front());
  });
  result.executed = true;
  result.seconds = reading.seconds;
  result.frames_per_second = static_cast<double>(p.n) / reading.seconds;
  result.record = MetricsRecord::from_run(p, reading.seconds, reading.joules);

  double sum = 0.0;
  for (std::size_t i = 0; i < image.size(); ++i) {
    const double mag = std::hypot(static_cast<double>(image.real()[i]), static_cast<double>(image.imag()[i]));
    sum += mag;
    result.image.max_magnitude = std::max(result.image.max_magnitude, mag);
  }
  result.image.mean_magnitude = image.size() ? sum / static_cast<double>(image.size()) : 0.0;
  double best = -1.0;
  for (std::size_t v = 0; v < p.m; ++v) {
    const double mag = std::hypot(static_cast<double>(image.re(v, 0)), static_cast<double>(image.im(v, 0)));
    if (mag > best) {
      best = mag;
      result.image.peak_voxel = v;
    }
  }

  if (o.verify) {
    const auto expected = oracle_cgemm_onebit(model, quantize_to_bits_transposed(measurement));
    result.mismatches = mismatches(image, expected);
    result.verified = result.mismatches == 0;
  }
  return result;
}

// ---------------------------------------------------------------------------

VerifyResult run_verify(const VerifyOptions& o) {
  if (o.max_mn == 0 || o.max_k == 0) throw std::invalid_argument("verify: size limits must be >= 1");
  std::mt19937_64 rng(o.seed);
  std::uniform_int_distribution<std::size_t> mn(1, o.max_mn), kd(1, o.max_k);
  VerifyResult result;
  const TileConfig tiles = o.tiles.value_or(default_tile_config(o.precision));
  for (std::size_t c = 0; c < o.cases; ++c) {
    const std::size_t batch = rng() % 2 ? 3 : 1;
    const std::size_t m = mn(rng), n = mn(rng), k = kd(rng);
    double error = 0.0;
    bool ok = true;
    if (o.precision == Precision::half) {
      std::vector<ComplexMatrix<Half>> a, b;
      for (std::size_t i = 0; i < batch; ++i) {
        a.push_back(random_half_matrix(m, k, rng));
        b.push_back(random_half_matrix(k, n, rng));
      }
      error = max_error(gemm_half(a, b, tiles), oracle_cgemm_double<Half>(a, b));
      ok = error <= half_tolerance(k);
    } else {
      std::vector<PackedComplex> a, b;
      for (std::size_t i = 0; i < batch; ++i) {
        a.push_back(random_bit_matrix(m, k, rng));
        b.push_back(random_bit_matrix(n, k, rng));
      }
      const auto got = gemm_onebit(a, b, o.bit_op, tiles);
      const auto expected = oracle_cgemm_onebit(a, b);
      std::size_t bad = 0;
      for (std::size_t i = 0; i < batch; ++i) bad += mismatches(got[i], expected[i]);
      error = static_cast<double>(bad);
      ok = bad == 0;
    }
    ++result.cases;
    if (!ok) ++result.failures;
    result.worst_error = std::max(result.worst_error, error);
  }
  return result;
}

// ---------------------------------------------------------------------------
// command line

namespace {

TileConfig parse_tiles(const std::string& text) {
  const auto parts = split(text, 'x');
  if (parts.size() != 5 && parts.size() != 6) {
    throw std::invalid_argument("--tiles expects m_outer x m_inner x n_outer x n_inner x k_block[x buffers]");
  }
  TileConfig t;
  t.m_outer = parse_size(parts[0], "m_outer");
  t.m_inner = parse_size(parts[1], "m_inner");
  t.n_outer = parse_size(parts[2], "n_outer");
  t.n_inner = parse_size(parts[3], "n_inner");
  t.k_block = parse_size(parts[4], "k_block");
  if (parts.size() == 6) t.buffers = parse_size(parts[5], "buffers");
  return t;
}

struct OutputSpec {
  std::string path;
  std::string format = "csv";
};

void emit(const std::vector<ReportRow>& rows, const OutputSpec& spec, std::ostream& out) {
  auto write = [&](std::ostream& os) {
    if (spec.format == "json") {
      write_json(os, rows);
    } else {
      write_csv(os, rows);
    }
  };
  if (spec.path.empty() || spec.path == "-") {
    write(out);
    return;
  }
  std::ofstream os(spec.path);
  if (!os) throw IoError("cannot open " + spec.path + " for writing");
  write(os);
  if (!os) throw IoError("write failed: " + spec.path);
}

std::vector<ReportRow> classify(const std::vector<MetricsRecord>& records, bool roofline, std::ostream& err) {
  if (!roofline) return unclassified_rows(records);
  err << "measuring machine ceilings...\n";
  const MachineCeiling ceiling = measure_ceilings();
  err << "peak f16 " << ceiling.peak_compute_half / 1e9 << " Gops/s, peak b1 " << ceiling.peak_compute_onebit / 1e9
      << " Gops/s, bandwidth " << ceiling.peak_bandwidth / 1e9 << " GB/s\n";
  return roofline_report(records, ceiling);
}

// Choice options bind to strings; CLI11 validates membership.
struct Choice {
  std::string precision = "f16";
  std::string bit_op = "xor";

  Precision get_precision() const { return *parse_precision(precision); }
  BitOp get_bit_op() const { return *parse_bit_op(bit_op); }
};

void add_precision(CLI::App* cmd, Choice& c) {
  cmd->add_option("--precision", c.precision, "f16 or b1")->check(CLI::IsMember({"f16", "b1"}));
}
void add_bit_op(CLI::App* cmd, Choice& c) {
  cmd->add_option("--bit-op", c.bit_op, "1-bit reduction: xor or and")->check(CLI::IsMember({"xor", "and"}));
}

void add_output_options(CLI::App* cmd, OutputSpec& spec) {
  cmd->add_option("--output,-o", spec.path, "Output file (default: stdout)");
  cmd->add_option("--format", spec.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reduced-precision complex GEMM and beamforming toolkit"};
  app.require_subcommand(1);
  int threads = 0;
  std::uint64_t seed = 1;
  std::string tiles_text;
  app.add_option("--threads", threads, "OpenMP threads (0: runtime default)")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", seed, "Seed for synthetic data");
  app.add_option("--tiles", tiles_text, "Tile override, e.g. 64x32x64x32x256");

  // bench
  auto* bench = app.add_subcommand("bench", "Time GEMMs over a shape or a size sweep");
  Choice bench_choice;
  std::size_t bm = 1024, bn = 1024, bk = 1024, bbatch = 1;
  std::string sweep_text, store_path;
  bool bench_tune = false, bench_verify = false, roofline = true;
  int bench_repeats = 5;
  OutputSpec bench_out;
  add_precision(bench, bench_choice);
  add_bit_op(bench, bench_choice);
  auto* opt_m = bench->add_option("--m", bm)->check(CLI::PositiveNumber);
  auto* opt_n = bench->add_option("--n", bn)->check(CLI::PositiveNumber);
  auto* opt_k = bench->add_option("--k", bk)->check(CLI::PositiveNumber);
  bench->add_option("--batch", bbatch)->check(CLI::PositiveNumber);
  bench->add_option("--sweep", sweep_text, "lo:hi:factor or lo:hi:+step; sweeps every dimension not set explicitly");
  bench->add_flag("--tune", bench_tune, "Tune each point before timing it");
  bench->add_option("--store", store_path, "Tuned-config store to read (and, with --tune, update)");
  bench->add_flag("--verify", bench_verify, "Check every point against the oracle");
  bench->add_flag("--roofline,!--no-roofline", roofline, "Measure ceilings and classify rows");
  bench->add_option("--repeats", bench_repeats)->check(CLI::PositiveNumber);
  add_output_options(bench, bench_out);

  // tune
  auto* tune_cmd = app.add_subcommand("tune", "Search tile parameters for one shape and store the winner");
  Choice tune_choice;
  std::size_t tm = 1024, tn = 1024, tk = 1024, tbatch = 1;
  std::string tune_store = "rpbf_tuned.txt";
  int tune_repeats = 5;
  add_precision(tune_cmd, tune_choice);
  add_bit_op(tune_cmd, tune_choice);
  tune_cmd->add_option("--m", tm)->check(CLI::PositiveNumber);
  tune_cmd->add_option("--n", tn)->check(CLI::PositiveNumber);
  tune_cmd->add_option("--k", tk)->check(CLI::PositiveNumber);
  tune_cmd->add_option("--batch", tbatch)->check(CLI::PositiveNumber);
  tune_cmd->add_option("--store", tune_store, "Tuned-config store file");
  tune_cmd->add_option("--repeats", tune_repeats)->check(CLI::PositiveNumber);

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "Compare the engines with the oracles on random shapes");
  VerifyOptions vopts;
  Choice verify_choice;
  verify_choice.precision = "b1";
  add_precision(verify_cmd, verify_choice);
  add_bit_op(verify_cmd, verify_choice);
  verify_cmd->add_option("--cases", vopts.cases)->check(CLI::PositiveNumber);
  verify_cmd->add_option("--max-mn", vopts.max_mn)->check(CLI::PositiveNumber);
  verify_cmd->add_option("--max-k", vopts.max_k)->check(CLI::PositiveNumber);

  // radio-demo
  auto* radio = app.add_subcommand("radio-demo", "Beamform a synthetic sky with one point source (float16)");
  RadioOptions ropts;
  OutputSpec radio_out;
  radio->add_option("--stations", ropts.stations)->check(CLI::PositiveNumber);
  radio->add_option("--beams", ropts.beams)->check(CLI::PositiveNumber);
  radio->add_option("--samples", ropts.samples)->check(CLI::PositiveNumber);
  radio->add_option("--polarizations", ropts.polarizations)->check(CLI::PositiveNumber);
  radio->add_option("--channels", ropts.channels)->check(CLI::PositiveNumber);
  radio->add_option("--source-beam", ropts.source_beam);
  radio->add_option("--noise", ropts.noise, "Per-sensor noise standard deviation")->check(CLI::NonNegativeNumber);
  radio->add_option("--repeats", ropts.repeats)->check(CLI::PositiveNumber);
  radio->add_flag("--verify", ropts.verify);
  add_output_options(radio, radio_out);

  // ultrasound-demo
  auto* ultra = app.add_subcommand("ultrasound-demo", "1-bit image reconstruction with a synthetic model matrix");
  UltrasoundOptions uopts;
  bool full = false;
  OutputSpec ultra_out;
  auto* u_vox = ultra->add_option("--voxels", uopts.voxels)->check(CLI::PositiveNumber);
  auto* u_frames = ultra->add_option("--frames", uopts.frames)->check(CLI::PositiveNumber);
  auto* u_freq = ultra->add_option("--frequencies", uopts.frequencies)->check(CLI::PositiveNumber);
  auto* u_trx = ultra->add_option("--transceivers", uopts.transceivers)->check(CLI::PositiveNumber);
  auto* u_tx = ultra->add_option("--transmissions", uopts.transmissions)->check(CLI::PositiveNumber);
  ultra->add_flag("--full", full, "Canonical 38880 x 8041 x 524288 shape (memory permitting)")
      ->excludes(u_vox)
      ->excludes(u_frames)
      ->excludes(u_freq)
      ->excludes(u_trx)
      ->excludes(u_tx);
  Choice ultra_choice;
  add_bit_op(ultra, ultra_choice);
  ultra->add_option("--repeats", uopts.repeats)->check(CLI::PositiveNumber);
  ultra->add_flag("--verify", uopts.verify);
  std::size_t memory_limit = 0;
  ultra->add_option("--memory-limit", memory_limit, "Assume this many bytes are available (default: probe)");
  add_output_options(ultra, ultra_out);

  // beamform
  auto* bf = app.add_subcommand("beamform", "Beamform a sensor-data matrix file with a job config");
  std::string config_path, input_path, output_path;
  bf->add_option("--config", config_path, "Job config (key = value)")->required();
  bf->add_option("--input", input_path, "Sensor data, sensors x samples matrix file")->required();
  bf->add_option("--output,-o", output_path, "Beams, beams x samples matrix file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsageError;
  }

  try {
    if (threads > 0) omp_set_num_threads(threads);
    std::optional<TileConfig> tiles;
    if (!tiles_text.empty()) tiles = parse_tiles(tiles_text);

    if (*bench) {
      const Precision bench_precision = bench_choice.get_precision();
      const BitOp bench_op = bench_choice.get_bit_op();
      if (tiles) tiles->validate(bench_precision);
      BenchOptions bopts;
      if (!sweep_text.empty()) {
        FixedDims fixed;
        if (opt_m->count()) fixed.m = bm;
        if (opt_n->count()) fixed.n = bn;
        if (opt_k->count()) fixed.k = bk;
        bopts.problems = sweep_problems(parse_sweep(sweep_text), fixed, bbatch, bench_precision, bench_op);
      } else {
        GemmProblem p{bbatch, bm, bn, bk, bench_precision, bench_op,
                      bench_precision == Precision::one_bit ? packing_pad(bk) : 0};
        p.validate();
        bopts.problems.push_back(p);
      }
      TunedStore store;
      if (!store_path.empty()) {
        std::vector<std::string> warnings;
        store = TunedStore::load(store_path, &warnings);
        for (const auto& w : warnings) err << "warning: " << w << '\n';
        bopts.store = &store;
      }
      bopts.tiles = tiles;
      bopts.tune = bench_tune;
      bopts.verify = bench_verify;
      bopts.seed = seed;
      bopts.repeats = bench_repeats;
      const auto points = run_bench(bopts, &err);
      if (bench_tune && !store_path.empty()) store.save(store_path);

      std::vector<MetricsRecord> records;
      bool all_ok = true;
      for (const auto& pt : points) {
        records.push_back(pt.record);
        if (pt.verified && !*pt.verified) all_ok = false;
      }
      emit(classify(records, roofline, err), bench_out, out);
      return all_ok ? kOk : kVerifyFailed;
    }

    if (*tune_cmd) {
      const Precision tune_precision = tune_choice.get_precision();
      const BitOp tune_op = tune_choice.get_bit_op();
      GemmProblem p{tbatch, tm, tn, tk, tune_precision, tune_op, tune_precision == Precision::one_bit ? packing_pad(tk) : 0};
      p.validate();
      std::vector<std::string> warnings;
      TunedStore store = TunedStore::load(tune_store, &warnings);
      for (const auto& w : warnings) err << "warning: " << w << '\n';
      const auto space = enumerate_search_space(SearchBounds::default_for(p.precision), p.precision);
      auto energy = energy_counter();
      WallClockMeter meter(energy.get(), 1, tune_repeats);
      err << "tuning " << space.size() << " configurations for " << to_string(p.precision) << ' ' << shape_class(p)
          << "...\n";
      const TuneResult result = tune(p, space, meter, TuneOptions{seed, true});
      out << "config,seconds,ops_per_s\n";
      for (const auto& s : result.samples) {
        out << s.config.to_string() << ',' << s.seconds << ',' << s.ops_per_second() << '\n';
      }
      for (const auto& r : result.rejected) err << "rejected (oracle mismatch): " << r.to_string() << '\n';
      store.put(TunedKey{machine_fingerprint(), p.precision, shape_class(p)}, result.best);
      store.save(tune_store);
      err << "best " << result.best.to_string() << " -> " << tune_store << '\n';
      return kOk;
    }

    if (*verify_cmd) {
      vopts.precision = verify_choice.get_precision();
      vopts.bit_op = verify_choice.get_bit_op();
      vopts.seed = seed;
      vopts.tiles = tiles;
      const VerifyResult r = run_verify(vopts);
      out << "cases=" << r.cases << " failures=" << r.failures << " worst_error=" << r.worst_error << '\n';
      return r.failures == 0 ? kOk : kVerifyFailed;
    }

    if (*radio) {
      ropts.seed = seed;
      ropts.tiles = tiles;
      const RadioResult r = run_radio_demo(ropts);
      bool hit = true;
      for (std::size_t b : r.peak_beams) hit = hit && b == r.source_beam;
      err << "source beam " << r.source_beam << ", peak beam " << r.peak_beams.front() << (hit ? "" : " (MISSED)")
          << ", mean amplitude " << r.peak_amplitude << " over " << r.problem.k << " stations\n";
      if (r.verified) err << "verify: rel_err=" << r.error << (*r.verified ? " ok" : " FAILED") << '\n';
      emit(unclassified_rows(std::vector{r.record}), radio_out, out);
      return (r.verified && !*r.verified) ? kVerifyFailed : kOk;
    }

    if (*ultra) {
      uopts.bit_op = ultra_choice.get_bit_op();
      UltrasoundOptions o = full ? UltrasoundOptions::full_scale() : uopts;
      if (full) {
        o.bit_op = uopts.bit_op;
        o.repeats = uopts.repeats;
        o.verify = uopts.verify;
      }
      o.seed = seed;
      o.tiles = tiles;
      if (memory_limit > 0) o.memory_available = memory_limit;
      const UltrasoundResult r = run_ultrasound_demo(o);
      if (!r.executed) {
        err << "ultrasound-demo: shape " << r.problem.m << " x " << r.problem.n << " x " << r.problem.k
            << " accepted but not run: " << r.skipped_reason << '\n';
        return kRuntimeError;
      }
      err << "frames/s " << r.frames_per_second << " (" << r.problem.n << " frames in " << r.seconds << " s)"
          << ", mean |voxel| " << r.image.mean_magnitude << ", max |voxel| " << r.image.max_magnitude << '\n';
      if (r.verified) err << "verify: " << r.mismatches << " mismatches" << (*r.verified ? " ok" : " FAILED") << '\n';
      emit(unclassified_rows(std::vector{r.record}), ultra_out, out);
      return (r.verified && !*r.verified) ? kVerifyFailed : kOk;
    }

    if (*bf) {
      const JobConfig cfg = load_job_config(config_path);
      const AnyMatrix input = load_matrix(input_path);
      ComplexMatrix<float> samples;
      if (const auto* h = std::get_if<ComplexMatrix<Half>>(&input)) {
        samples = convert<float>(*h);
      } else if (const auto* f = std::get_if<ComplexMatrix<float>>(&input)) {
        samples = *f;
      } else if (const auto* d = std::get_if<ComplexMatrix<double>>(&input)) {
        samples = convert<float>(*d);
      } else {
        throw FormatError("beamform: input must be a half, single or double complex matrix");
      }
      BeamformJob job;
      job.plans.push_back(make_steering_weights(cfg.geometry, cfg.beam_angles, cfg.normalize));
      job.samples.push_back(std::move(samples));
      job.precision = cfg.precision;
      job.bit_op = cfg.bit_op;
      job.tiles = tiles;
      const BeamBlock beams = beamform_block(job);
      std::visit(
          [&](const auto& blocks) {
            const auto power = beam_power(blocks.front());
            const std::size_t peak = argmax(power);
            err << "peak beam " << peak << " at " << cfg.beam_angles[peak] * 180.0 / std::numbers::pi
                << " deg, power " << power[peak] << '\n';
            save_matrix(output_path, AnyMatrix{blocks.front()});
          },
          beams);
      return kOk;
    }
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kUsageError;
}

}  // namespace rpbf::cli
