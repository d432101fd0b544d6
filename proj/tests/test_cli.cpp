#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cli.hpp"
#include "rpbf/matrix_io.hpp"

using namespace rpbf;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "rpbf");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

// CSV row without the timing-dependent columns (seconds onward).
std::string shape_columns(const std::string& row) {
  std::size_t pos = 0;
  for (int i = 0; i < 8; ++i) pos = row.find(',', pos) + 1;
  return row.substr(0, pos);
}

}  // namespace

TEST_CASE("sweep parsing") {
  CHECK(cli::parse_sweep("256:4096:2").points() == std::vector<std::size_t>{256, 512, 1024, 2048, 4096});
  CHECK(cli::parse_sweep("8:8:2").points() == std::vector<std::size_t>{8});
  CHECK(cli::parse_sweep("510:514:+2").points() == std::vector<std::size_t>{510, 512, 514});
  for (const char* bad : {"", "1:2", "0:8:2", "8:4:2", "1:8:1", "1:8:+0", "a:8:2", "1:8:2:4"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS((void)cli::parse_sweep(bad), std::invalid_argument);
  }
  cli::FixedDims fixed;
  fixed.k = 100;
  const auto problems = cli::sweep_problems(cli::parse_sweep("16:64:2"), fixed, 2, Precision::one_bit, BitOp::and_);
  REQUIRE(problems.size() == 3);
  CHECK(problems[1].m == 32);
  CHECK(problems[1].n == 32);
  CHECK(problems[1].k == 100);
  CHECK(problems[1].k_pad == 28);
  CHECK(problems[1].batch == 2);
}

TEST_CASE("bench sweep emits one row per point") {
  const auto r = run({"bench", "--sweep", "16:64:2", "--no-roofline", "--repeats", "1"});
  CHECK(r.code == cli::kOk);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == "precision,batch,M,N,K,ops,bytes,ai,seconds,ops_per_s,joules,ops_per_j,bound");
  CHECK(rows[1].rfind("f16,1,16,16,16,", 0) == 0);
  CHECK(rows[3].rfind("f16,1,64,64,64,", 0) == 0);
}

TEST_CASE("bench --verify on 1-bit points reports exact matches") {
  const auto r = run({"bench", "--precision", "b1", "--sweep", "20:80:2", "--k", "333", "--batch", "3", "--verify",
                      "--no-roofline", "--repeats", "1", "--format", "json"});
  CHECK(r.code == cli::kOk);
  CHECK(r.err.find("mismatches=0 verify=ok") != std::string::npos);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.size() == 3);
  CHECK(j[0]["precision"] == "b1");
  CHECK(j[0]["K"] == 333);
}

TEST_CASE("bench --verify on half points") {
  const auto r = run({"bench", "--m", "70", "--n", "33", "--k", "129", "--verify", "--no-roofline", "--repeats", "1"});
  CHECK(r.code == cli::kOk);
  CHECK(r.err.find("verify=ok") != std::string::npos);
}

TEST_CASE("synthetic data is deterministic under a fixed seed") {
  auto once = [] {
    return run({"--seed", "42", "bench", "--sweep", "8:32:2", "--no-roofline", "--repeats", "1"}).out;
  };
  const auto a = lines(once()), b = lines(once());
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(shape_columns(a[i]) == shape_columns(b[i]));
}

TEST_CASE("bench with roofline classification") {
  const auto r = run({"bench", "--sweep", "8:8:2", "--repeats", "1"});
  CHECK(r.code == cli::kOk);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].substr(rows[1].rfind(',') + 1) == "memory");
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == cli::kUsageError);
  CHECK(run({"bench", "--bogus"}).code == cli::kUsageError);
  CHECK(run({"bench", "--precision", "f32"}).code == cli::kUsageError);
  CHECK(run({"bench", "--sweep", "64:16:2"}).code == cli::kUsageError);
  CHECK(run({"bench", "--m", "0"}).code == cli::kUsageError);
  CHECK(run({"--tiles", "64x48x64x32x256", "bench", "--m", "8", "--n", "8", "--k", "8"}).code == cli::kUsageError);
  CHECK(run({"bench", "--m", "8", "--n", "8", "--k", "8", "--no-roofline", "--output", "/nonexistent/dir/out.csv"})
            .code == cli::kIoError);
  CHECK(run({"beamform", "--config", "/nonexistent.cfg", "--input", "x", "--output", "y"}).code == cli::kIoError);
  CHECK(run({"--help"}).code == cli::kOk);
}

TEST_CASE("verify subcommand") {
  const auto r = run({"verify", "--cases", "20", "--max-k", "300"});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("failures=0") != std::string::npos);
  CHECK(run({"verify", "--precision", "f16", "--cases", "5", "--max-k", "200"}).code == cli::kOk);
  CHECK(run({"verify", "--bit-op", "and", "--cases", "5"}).code == cli::kOk);
}

TEST_CASE("radio demo finds the injected source") {
  cli::RadioOptions o;
  o.stations = 48;
  o.beams = 256;
  o.samples = 64;
  o.polarizations = 2;
  o.channels = 2;
  o.repeats = 1;
  o.verify = true;
  const auto r = cli::run_radio_demo(o);
  CHECK(r.source_beam == 100);
  for (std::size_t b : r.peak_beams) CHECK(b == 100);
  CHECK(r.peak_amplitude == doctest::Approx(48.0).epsilon(0.01));
  CHECK(*r.verified);
  CHECK(r.record.problem.k == 48);
  CHECK(r.record.problem.batch == 4);

  o.beams = 1;
  o.verify = false;
  const auto single = cli::run_radio_demo(o);
  CHECK(single.source_beam == 0);
  CHECK(single.peak_beams.front() == 0);
}

TEST_CASE("radio demo through the command line emits a metrics row") {
  const auto r = run({"radio-demo", "--stations", "48", "--beams", "128", "--samples", "32", "--channels", "1",
                      "--repeats", "1", "--verify"});
  CHECK(r.code == cli::kOk);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].rfind("f16,2,128,32,48,", 0) == 0);
  CHECK(r.err.find("peak beam 100") != std::string::npos);
}

TEST_CASE("ultrasound demo") {
  cli::UltrasoundOptions o;
  o.voxels = 97;
  o.frames = 31;
  o.frequencies = 3;
  o.transceivers = 5;
  o.transmissions = 7;
  o.repeats = 2;
  o.verify = true;
  const auto r = cli::run_ultrasound_demo(o);
  REQUIRE(r.executed);
  CHECK(r.problem.k == 105);
  CHECK(r.problem.k_pad == 23);
  CHECK(*r.verified);
  CHECK(r.frames_per_second == doctest::Approx(31.0 / r.seconds));
  CHECK(r.record.seconds == r.seconds);
  CHECK(r.image.max_magnitude >= r.image.mean_magnitude);

  o.bit_op = BitOp::and_;
  CHECK(*cli::run_ultrasound_demo(o).verified);
}

TEST_CASE("canonical ultrasound shape is accepted and declined without memory") {
  const auto full = cli::UltrasoundOptions::full_scale();
  CHECK(full.voxels == 38880);
  CHECK(full.frames == 8041);
  CHECK(full.frequencies * full.transceivers * full.transmissions == 524288);

  auto o = full;
  o.memory_available = std::size_t{1} << 30;
  const auto r = cli::run_ultrasound_demo(o);
  CHECK_FALSE(r.executed);
  CHECK(r.problem.k == 524288);
  CHECK(r.bytes_required > *r.bytes_available);
  CHECK_FALSE(r.skipped_reason.empty());

  const auto cmd = run({"ultrasound-demo", "--full", "--memory-limit", "1000000"});
  CHECK(cmd.code == cli::kRuntimeError);
  CHECK(cmd.err.find("38880 x 8041 x 524288 accepted") != std::string::npos);
  CHECK(run({"ultrasound-demo", "--full", "--voxels", "10"}).code == cli::kUsageError);
}

TEST_CASE("beamform subcommand") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "rpbf_cli_beamform";
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "job.cfg");
    cfg << "wave_speed = 343\nfrequency = 1000\nsensors = 16\nbeam_range_deg = -30:30:10\n";
  }
  ArrayGeometry g = ArrayGeometry::half_wavelength_line(16, 343, 1000);
  const auto x = simulate_plane_wave(g, 10 * std::numbers::pi / 180, 8, 8000.0);
  save_matrix(dir / "x.bbm", AnyMatrix{convert<float>(x)});

  const auto r = run({"beamform", "--config", (dir / "job.cfg").string(), "--input", (dir / "x.bbm").string(),
                      "--output", (dir / "y.bbm").string()});
  CHECK(r.code == cli::kOk);
  CHECK(r.err.find("peak beam 4") != std::string::npos);
  const auto y = std::get<ComplexMatrix<float>>(load_matrix(dir / "y.bbm"));
  CHECK(y.rows() == 7);
  CHECK(y.cols() == 8);

  {
    std::ofstream cfg(dir / "b1.cfg");
    cfg << "sensors = 16\nbeam_range_deg = -30:30:10\nprecision = b1\n";
  }
  const auto r1 = run({"beamform", "--config", (dir / "b1.cfg").string(), "--input", (dir / "x.bbm").string(),
                       "--output", (dir / "y1.bbm").string()});
  CHECK(r1.code == cli::kOk);
  CHECK(std::holds_alternative<ComplexMatrix<std::int32_t>>(load_matrix(dir / "y1.bbm")));
  fs::remove_all(dir);
}
