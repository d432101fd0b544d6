#include <algorithm>
#include <cmath>
#include <numbers>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "rpbf/beamform.hpp"
#include "rpbf/errors.hpp"

namespace rpbf {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& text, const std::string& key) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw FormatError("job config: '" + key + "' expects a number, got '" + text + "'");
  }
  if (trim(text.substr(pos)).size() != 0) throw FormatError("job config: trailing text in '" + key + "'");
  return v;
}

std::vector<double> parse_list(std::string text, const std::string& key) {
  std::replace(text.begin(), text.end(), ',', ' ');
  std::istringstream is(text);
  std::vector<double> out;
  for (std::string tok; is >> tok;) out.push_back(parse_number(tok, key));
  if (out.empty()) throw FormatError("job config: '" + key + "' is empty");
  return out;
}

bool parse_bool(const std::string& text, const std::string& key) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw FormatError("job config: '" + key + "' expects true/false");
}

}  // namespace

JobConfig parse_job_config(std::istream& is) {
  std::map<std::string, std::string> kv;
  std::size_t line_no = 0;
  for (std::string line; std::getline(is, line);) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("job config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (kv.count(key)) throw FormatError("job config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    kv[key] = trim(line.substr(eq + 1));
  }

  static const char* known[] = {"wave_speed", "frequency",  "sensor_positions", "sensors", "sensor_spacing",
                                "beam_angles_deg", "beam_range_deg", "precision", "bit_op", "normalize"};
  for (const auto& [key, _] : kv) {
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) == std::end(known)) {
      throw FormatError("job config: unknown key '" + key + "'");
    }
  }

  JobConfig cfg;
  if (kv.count("wave_speed")) cfg.geometry.wave_speed = parse_number(kv["wave_speed"], "wave_speed");
  if (kv.count("frequency")) cfg.geometry.frequency = parse_number(kv["frequency"], "frequency");

  if (kv.count("sensor_positions")) {
    if (kv.count("sensors") || kv.count("sensor_spacing")) {
      throw FormatError("job config: give either sensor_positions or sensors + sensor_spacing");
    }
    cfg.geometry.sensor_positions = parse_list(kv["sensor_positions"], "sensor_positions");
  } else if (kv.count("sensors")) {
    const double count = parse_number(kv["sensors"], "sensors");
    if (count < 1 || count != std::floor(count)) throw FormatError("job config: sensors must be a positive integer");
    const double spacing = kv.count("sensor_spacing") ? parse_number(kv["sensor_spacing"], "sensor_spacing")
                                                      : 0.5 * cfg.geometry.wavelength();
    cfg.geometry = ArrayGeometry::uniform_line(static_cast<std::size_t>(count), spacing, cfg.geometry.wave_speed,
                                               cfg.geometry.frequency);
  } else {
    throw FormatError("job config: sensor_positions or sensors is required");
  }

  if (kv.count("beam_angles_deg") && kv.count("beam_range_deg")) {
    throw FormatError("job config: give either beam_angles_deg or beam_range_deg");
  }
  if (kv.count("beam_angles_deg")) {
    for (double deg : parse_list(kv["beam_angles_deg"], "beam_angles_deg")) {
      cfg.beam_angles.push_back(deg * std::numbers::pi / 180.0);
    }
  } else if (kv.count("beam_range_deg")) {
    std::string text = kv["beam_range_deg"];
    std::replace(text.begin(), text.end(), ':', ' ');
    const auto parts = parse_list(text, "beam_range_deg");
    if (parts.size() != 3) throw FormatError("job config: beam_range_deg expects lo:hi:step");
    try {
      cfg.beam_angles = angle_range_deg(parts[0], parts[1], parts[2]);
    } catch (const std::invalid_argument& e) {
      throw FormatError(std::string("job config: ") + e.what());
    }
  } else {
    throw FormatError("job config: beam_angles_deg or beam_range_deg is required");
  }

  if (kv.count("precision")) {
    const auto p = parse_precision(kv["precision"]);
    if (!p) throw FormatError("job config: precision must be f16 or b1");
    cfg.precision = *p;
  }
  if (kv.count("bit_op")) {
    const auto op = parse_bit_op(kv["bit_op"]);
    if (!op) throw FormatError("job config: bit_op must be xor or and");
    cfg.bit_op = *op;
  }
  if (kv.count("normalize")) cfg.normalize = parse_bool(kv["normalize"], "normalize");

  try {
    cfg.geometry.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("job config: ") + e.what());
  }
  return cfg;
}

JobConfig load_job_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open job config " + path.string());
  return parse_job_config(is);
}

}  // namespace rpbf
