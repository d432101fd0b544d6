#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "rpbf/complex_matrix.hpp"
#include "rpbf/problem.hpp"
#include "rpbf/tile_config.hpp"

namespace rpbf {

/// Sensors along a line at offsets d_k (meters) from the reference point.
struct ArrayGeometry {
  std::vector<double> sensor_positions;
  double wave_speed = 343.0;  // m/s
  double frequency = 1.0e3;   // Hz

  void validate() const;
  double wavelength() const { return wave_speed / frequency; }
  std::size_t sensors() const noexcept { return sensor_positions.size(); }

  static ArrayGeometry uniform_line(std::size_t sensors, double spacing, double wave_speed, double frequency);
  /// Half-wavelength spacing at `frequency`.
  static ArrayGeometry half_wavelength_line(std::size_t sensors, double wave_speed, double frequency);
};

/// Far-field arrival delay tau_k = d_k sin(theta) / c (theta from broadside).
double arrival_delay(const ArrayGeometry& g, std::size_t sensor, double theta);

/// Beam weights W (beams x sensors), w_bk = exp(+2 pi i f tau_k(theta_b)).
/// The positive exponent cancels the -2 pi i f tau_k phase a delayed
/// narrowband signal picks up, so a source at theta_b sums coherently.
struct SteeringPlan {
  ArrayGeometry geometry;
  std::vector<double> beam_angles;  // radians
  ComplexMatrix<double> weights;
  bool normalized = false;  // weights carry an extra 1/K factor

  std::size_t beams() const noexcept { return weights.rows(); }
  std::size_t sensors() const noexcept { return weights.cols(); }
};

SteeringPlan make_steering_weights(const ArrayGeometry& geometry, std::span<const double> beam_angles,
                                   bool normalize = false);

/// Evenly spaced angles lo, lo+step, ... <= hi (+ half a step of slack), in radians.
std::vector<double> angle_range_deg(double lo_deg, double hi_deg, double step_deg);

/// Noiseless narrowband plane wave from `theta`: x_k(t) = a exp(2 pi i f (t - tau_k)),
/// sampled at t = n / sample_rate. Returns sensors x samples.
ComplexMatrix<double> simulate_plane_wave(const ArrayGeometry& geometry, double theta, std::size_t samples,
                                          double sample_rate, std::complex<double> amplitude = 1.0);

/// One block of sensor data per batch entry (polarization x channel), each
/// K x N. `plans` holds one plan shared by all entries or one per entry.
struct BeamformJob {
  std::vector<SteeringPlan> plans;
  std::vector<ComplexMatrix<float>> samples;
  Precision precision = Precision::half;
  BitOp bit_op = BitOp::xor_;
  std::optional<TileConfig> tiles;

  std::size_t batch() const noexcept { return samples.size(); }
};

using BeamBlock = std::variant<std::vector<ComplexMatrix<float>>, std::vector<ComplexMatrix<std::int32_t>>>;

/// Beams x samples per batch entry. half: gemm_half on float16 weights and
/// samples. one_bit: sign-quantize weights and samples, pack, tile and run
/// the 1-bit engine; beams are exact integers.
BeamBlock beamform_block(const BeamformJob& job);
std::vector<ComplexMatrix<float>> beamform_half(const BeamformJob& job);
std::vector<ComplexMatrix<std::int32_t>> beamform_onebit(const BeamformJob& job);

/// Mean |y|^2 over samples, per beam.
template <typename T>
std::vector<double> beam_power(const ComplexMatrix<T>& beams);
/// Index of the largest value; the first one on ties.
std::size_t argmax(std::span<const double> values);

/// Radio telescope mapping: M = beams, N = samples, K = stations,
/// batch = polarizations x channels, float16.
GemmProblem map_radio_job(std::size_t stations, std::size_t beams, std::size_t samples, std::size_t polarizations,
                          std::size_t channels);

/// Ultrasound mapping: M = voxels, N = frames,
/// K = frequencies x transceivers x transmissions, 1-bit.
GemmProblem map_ultrasound_job(std::size_t voxels, std::size_t frames, std::size_t frequencies,
                               std::size_t transceivers, std::size_t transmissions);

/// Plain-text job description. One `key = value` per line, '#' comments.
///   wave_speed = 343              (m/s)
///   frequency = 1000              (Hz)
///   sensor_positions = 0, 0.1, ...  (m)   or   sensors = 64 + sensor_spacing = 0.1715
///   beam_angles_deg = -30, 0, 30          or   beam_range_deg = -60:60:1
///   precision = f16 | b1
///   bit_op = xor | and
///   normalize = true | false
struct JobConfig {
  ArrayGeometry geometry;
  std::vector<double> beam_angles;  // radians
  Precision precision = Precision::half;
  BitOp bit_op = BitOp::xor_;
  bool normalize = false;
};

JobConfig parse_job_config(std::istream& is);
JobConfig load_job_config(const std::filesystem::path& path);

extern template std::vector<double> beam_power(const ComplexMatrix<float>&);
extern template std::vector<double> beam_power(const ComplexMatrix<double>&);
extern template std::vector<double> beam_power(const ComplexMatrix<std::int32_t>&);

}  // namespace rpbf
