#include "rpbf/beamform.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "rpbf/cgemm.hpp"
#include "rpbf/errors.hpp"
#include "rpbf/quantpack.hpp"

namespace rpbf {

namespace {

void check_job(const BeamformJob& job) {
  if (job.samples.empty()) throw ShapeError("beamform: job has no sample blocks");
  if (job.plans.size() != 1 && job.plans.size() != job.samples.size()) {
    throw ShapeError("beamform: need one steering plan or one per batch entry");
  }
  for (std::size_t i = 0; i < job.samples.size(); ++i) {
    const SteeringPlan& plan = job.plans.size() == 1 ? job.plans.front() : job.plans[i];
    if (plan.beams() == 0) throw ShapeError("beamform: steering plan has no beams");
    if (plan.sensors() != job.samples[i].rows()) {
      throw ShapeError("beamform: plan has " + std::to_string(plan.sensors()) + " sensors but sample block " +
                       std::to_string(i) + " has " + std::to_string(job.samples[i].rows()) + " rows");
    }
  }
}

const SteeringPlan& plan_for(const BeamformJob& job, std::size_t i) {
  return job.plans.size() == 1 ? job.plans.front() : job.plans[i];
}

void require_positive(std::size_t v, const char* name) {
  if (v == 0) throw std::invalid_argument(std::string(name) + " must be >= 1");
}

}  // namespace

void ArrayGeometry::validate() const {
  if (sensor_positions.empty()) throw std::invalid_argument("ArrayGeometry: at least one sensor is required");
  if (!(wave_speed > 0.0) || !std::isfinite(wave_speed)) throw std::invalid_argument("ArrayGeometry: wave_speed must be > 0");
  if (!(frequency > 0.0) || !std::isfinite(frequency)) throw std::invalid_argument("ArrayGeometry: frequency must be > 0");
  for (double d : sensor_positions) {
    if (!std::isfinite(d)) throw std::invalid_argument("ArrayGeometry: sensor positions must be finite");
  }
}

ArrayGeometry ArrayGeometry::uniform_line(std::size_t sensors, double spacing, double wave_speed, double frequency) {
  ArrayGeometry g;
  g.wave_speed = wave_speed;
  g.frequency = frequency;
  g.sensor_positions.resize(sensors);
  for (std::size_t k = 0; k < sensors; ++k) g.sensor_positions[k] = static_cast<double>(k) * spacing;
  return g;
}

ArrayGeometry ArrayGeometry::half_wavelength_line(std::size_t sensors, double wave_speed, double frequency) {
  return uniform_line(sensors, 0.5 * wave_speed / frequency, wave_speed, frequency);
}

double arrival_delay(const ArrayGeometry& g, std::size_t sensor, double theta) {
  return g.sensor_positions[sensor] * std::sin(theta) / g.wave_speed;
}

SteeringPlan make_steering_weights(const ArrayGeometry& geometry, std::span<const double> beam_angles,
                                   bool normalize) {
  geometry.validate();
  SteeringPlan plan;
  plan.geometry = geometry;
  plan.beam_angles.assign(beam_angles.begin(), beam_angles.end());
  plan.normalized = normalize;
  plan.weights = ComplexMatrix<double>(beam_angles.size(), geometry.sensors());
  const double scale = normalize ? 1.0 / static_cast<double>(geometry.sensors()) : 1.0;
  for (std::size_t b = 0; b < beam_angles.size(); ++b) {
    for (std::size_t k = 0; k < geometry.sensors(); ++k) {
      const double phase = 2.0 * std::numbers::pi * geometry.frequency * arrival_delay(geometry, k, beam_angles[b]);
      plan.weights.re(b, k) = scale * std::cos(phase);
      plan.weights.im(b, k) = scale * std::sin(phase);
    }
  }
  return plan;
}

std::vector<double> angle_range_deg(double lo_deg, double hi_deg, double step_deg) {
  if (!(step_deg > 0.0) || hi_deg < lo_deg) throw std::invalid_argument("angle_range_deg: need step > 0 and hi >= lo");
  std::vector<double> out;
  const auto count = static_cast<std::size_t>(std::floor((hi_deg - lo_deg) / step_deg + 0.5)) + 1;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back((lo_deg + static_cast<double>(i) * step_deg) * std::numbers::pi / 180.0);
  }
  return out;
}

ComplexMatrix<double> simulate_plane_wave(const ArrayGeometry& geometry, double theta, std::size_t samples,
                                          double sample_rate, std::complex<double> amplitude) {
  geometry.validate();
  if (!(sample_rate > 0.0)) throw std::invalid_argument("simulate_plane_wave: sample_rate must be > 0");
  ComplexMatrix<double> x(geometry.sensors(), samples);
  for (std::size_t k = 0; k < geometry.sensors(); ++k) {
    const double tau = arrival_delay(geometry, k, theta);
    for (std::size_t n = 0; n < samples; ++n) {
      const double t = static_cast<double>(n) / sample_rate;
      const std::complex<double> v =
          amplitude * std::polar(1.0, 2.0 * std::numbers::pi * geometry.frequency * (t - tau));
      x.re(k, n) = v.real();
      x.im(k, n) = v.imag();
    }
  }
  return x;
}

std::vector<ComplexMatrix<float>> beamform_half(const BeamformJob& job) {
  check_job(job);
  const TileConfig tiles = job.tiles.value_or(default_tile_config(Precision::half));
  std::vector<ComplexMatrix<Half>> w, x;
  for (std::size_t i = 0; i < job.batch(); ++i) {
    w.push_back(convert<Half>(plan_for(job, i).weights));
    x.push_back(convert<Half>(job.samples[i]));
  }
  return gemm_half(w, x, tiles);
}

std::vector<ComplexMatrix<std::int32_t>> beamform_onebit(const BeamformJob& job) {
  check_job(job);
  const TileConfig tiles = job.tiles.value_or(default_tile_config(Precision::one_bit));
  std::vector<PackedComplex> w, x;
  for (std::size_t i = 0; i < job.batch(); ++i) {
    w.push_back(quantize_to_bits(plan_for(job, i).weights));
    x.push_back(quantize_to_bits_transposed(job.samples[i]));
  }
  return gemm_onebit(w, x, job.bit_op, tiles);
}

BeamBlock beamform_block(const BeamformJob& job) {
  if (job.precision == Precision::half) return beamform_half(job);
  return beamform_onebit(job);
}

template <typename T>
std::vector<double> beam_power(const ComplexMatrix<T>& beams) {
  std::vector<double> power(beams.rows(), 0.0);
  if (beams.cols() == 0) return power;
  for (std::size_t b = 0; b < beams.rows(); ++b) {
    double sum = 0.0;
    for (std::size_t n = 0; n < beams.cols(); ++n) {
      const double re = static_cast<double>(beams.re(b, n));
      const double im = static_cast<double>(beams.im(b, n));
      sum += re * re + im * im;
    }
    power[b] = sum / static_cast<double>(beams.cols());
  }
  return power;
}

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("argmax: empty input");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

GemmProblem map_radio_job(std::size_t stations, std::size_t beams, std::size_t samples, std::size_t polarizations,
                          std::size_t channels) {
  require_positive(stations, "stations");
  require_positive(beams, "beams");
  require_positive(samples, "samples");
  require_positive(polarizations, "polarizations");
  require_positive(channels, "channels");
  GemmProblem p;
  p.m = beams;
  p.n = samples;
  p.k = stations;
  p.batch = polarizations * channels;
  p.precision = Precision::half;
  return p;
}

GemmProblem map_ultrasound_job(std::size_t voxels, std::size_t frames, std::size_t frequencies,
                               std::size_t transceivers, std::size_t transmissions) {
  require_positive(voxels, "voxels");
  require_positive(frames, "frames");
  require_positive(frequencies, "frequencies");
  require_positive(transceivers, "transceivers");
  require_positive(transmissions, "transmissions");
  GemmProblem p;
  p.m = voxels;
  p.n = frames;
  p.k = frequencies * transceivers * transmissions;
  p.batch = 1;
  p.precision = Precision::one_bit;
  p.k_pad = packing_pad(p.k);
  return p;
}

template std::vector<double> beam_power(const ComplexMatrix<float>&);
template std::vector<double> beam_power(const ComplexMatrix<double>&);
template std::vector<double> beam_power(const ComplexMatrix<std::int32_t>&);

}  // namespace rpbf
