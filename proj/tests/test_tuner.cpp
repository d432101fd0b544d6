#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "rpbf/tuner.hpp"

using namespace rpbf;

namespace {

// Scripted meter: seconds (and optional joules) per config; never runs.
class MockMeter final : public Meter {
 public:
  std::map<TileConfig, MeterReading> script;
  MeterReading fallback{1.0, std::nullopt};
  std::vector<TileConfig> seen;

  MeterReading measure(const TileConfig& config, const std::function<void()>&) override {
    seen.push_back(config);
    const auto it = script.find(config);
    return it == script.end() ? fallback : it->second;
  }
};

GemmProblem small_half() {
  GemmProblem p;
  p.m = 40;
  p.n = 24;
  p.k = 50;
  return p;
}

}  // namespace

TEST_CASE("search space by hand") {
  SearchBounds b{{64, 128}, {32, 64}, {32}, {32}, {256}, {1}};
  const auto space = enumerate_search_space(b, Precision::half);
  REQUIRE(space.size() == 4);
  CHECK(space[0] == TileConfig{64, 32, 32, 32, 256, 1});
  CHECK(space[1] == TileConfig{64, 64, 32, 32, 256, 1});
  CHECK(space[2] == TileConfig{128, 32, 32, 32, 256, 1});
  CHECK(space[3] == TileConfig{128, 64, 32, 32, 256, 1});
  CHECK(enumerate_search_space(b, Precision::one_bit).size() == 4);

  SearchBounds single{{64}, {32}, {64}, {32}, {256}, {1}};
  CHECK(enumerate_search_space(single, Precision::half).size() == 1);

  SearchBounds none{{32}, {64}, {32}, {64}, {256}, {1}};
  CHECK_THROWS_AS((void)enumerate_search_space(none, Precision::half), std::invalid_argument);
}

TEST_CASE("default bounds contain the shipped default") {
  for (Precision p : {Precision::half, Precision::one_bit}) {
    const auto space = enumerate_search_space(SearchBounds::default_for(p), p);
    CHECK(std::find(space.begin(), space.end(), default_tile_config(p)) != space.end());
    CHECK(std::is_sorted(space.begin(), space.end()));
  }
}

TEST_CASE("selection rule") {
  const TileConfig a{64, 32, 64, 32, 256, 1}, b{32, 16, 32, 16, 128, 1}, c{128, 64, 128, 64, 512, 1};
  SUBCASE("fastest wins") {
    std::vector<MeasurementSample> s{{a, 0.5, 100, {}}, {b, 1.0, 100, {}}, {c, 0.75, 100, {}}};
    CHECK(select_best(s) == 0);
  }
  SUBCASE("equal time: lower energy wins") {
    std::vector<MeasurementSample> s{{a, 1.0, 100, 9.0}, {b, 1.0, 100, 4.0}};
    CHECK(select_best(s) == 1);
  }
  SUBCASE("equal time: a measured energy beats none") {
    std::vector<MeasurementSample> s{{b, 1.0, 100, std::nullopt}, {c, 1.0, 100, 50.0}};
    CHECK(select_best(s) == 1);
  }
  SUBCASE("full tie: smallest config") {
    std::vector<MeasurementSample> s{{c, 1.0, 100, {}}, {a, 1.0, 100, {}}, {b, 1.0, 100, {}}};
    CHECK(s[select_best(s)].config == b);
  }
  CHECK_THROWS_AS((void)select_best({}), std::invalid_argument);
}

TEST_CASE("tune with a mock meter") {
  const auto p = small_half();
  const auto space = enumerate_search_space(SearchBounds{{64}, {16, 32, 64}, {32}, {16}, {128}, {1}}, Precision::half);
  REQUIRE(space.size() == 3);
  MockMeter meter;
  meter.script[space[2]] = {0.25, std::nullopt};
  const auto r1 = tune(p, space, meter);
  CHECK(r1.best == space[2]);
  CHECK(r1.rejected.empty());
  // the shipped default is measured too
  CHECK(r1.samples.size() == 4);
  CHECK(std::find(meter.seen.begin(), meter.seen.end(), default_tile_config(Precision::half)) != meter.seen.end());

  MockMeter again;
  again.script = meter.script;
  CHECK(tune(p, space, again).best == r1.best);

  MockMeter tied;
  tied.script[space[0]] = {1.0, 2.0};
  tied.script[space[1]] = {1.0, 1.0};
  CHECK(tune(p, space, tied).best == space[1]);

  TuneOptions no_default;
  no_default.include_default = false;
  MockMeter m3;
  CHECK(tune(p, space, m3, no_default).samples.size() == 3);
}

TEST_CASE("tune a 1-bit problem with a mock meter") {
  GemmProblem p;
  p.m = 20;
  p.n = 20;
  p.k = 200;
  p.precision = Precision::one_bit;
  p.k_pad = packing_pad(200);
  const auto space =
      enumerate_search_space(SearchBounds{{16}, {8}, {16}, {8, 16}, {512}, {1}}, Precision::one_bit);
  MockMeter meter;
  meter.script[space[1]] = {0.1, std::nullopt};
  CHECK(tune(p, space, meter).best == space[1]);
}

TEST_CASE("wall clock meter runs warm-up plus repeats") {
  WallClockMeter meter(nullptr, 1, 5);
  int calls = 0;
  const auto r = meter.measure(TileConfig{}, [&] {
    ++calls;
    volatile double x = 0;
    for (int i = 0; i < 10000; ++i) x = x + i;
  });
  CHECK(calls == 6);
  CHECK(r.seconds > 0.0);
  CHECK_FALSE(r.joules.has_value());
}

TEST_CASE("shape classes round up to powers of two") {
  GemmProblem p;
  p.m = 1000;
  p.n = 1024;
  p.k = 1025;
  CHECK(shape_class(p) == "1024x1024x2048");
  p.m = p.n = p.k = 1;
  CHECK(shape_class(p) == "1x1x1");
}

TEST_CASE("machine fingerprint is stable and single-token") {
  const auto fp = machine_fingerprint();
  CHECK_FALSE(fp.empty());
  CHECK(fp.find(' ') == std::string::npos);
  CHECK(fp == machine_fingerprint());
}

TEST_CASE("tuned store") {
  TunedStore store;
  const TunedKey key{"cpu-x", Precision::half, "1024x1024x1024"};
  const TileConfig cfg{128, 64, 64, 32, 512, 1};
  store.put(key, cfg);
  store.put(TunedKey{"cpu-x", Precision::one_bit, "64x64x4096"}, TileConfig{16, 8, 16, 8, 2048, 1});

  SUBCASE("round trip") {
    std::stringstream ss;
    store.save(ss);
    std::vector<std::string> warnings;
    const auto loaded = TunedStore::parse(ss, &warnings);
    CHECK(warnings.empty());
    CHECK(loaded == store);
  }
  SUBCASE("lookup falls back to the default") {
    GemmProblem p;
    p.m = p.n = p.k = 1000;
    CHECK(store.lookup("cpu-x", p) == cfg);
    CHECK(store.lookup("cpu-y", p) == default_tile_config(Precision::half));
    p.k = 2000;
    CHECK(store.lookup("cpu-x", p) == default_tile_config(Precision::half));
  }
  SUBCASE("missing file") {
    std::vector<std::string> warnings;
    const auto loaded = TunedStore::load("/nonexistent/rpbf_store.txt", &warnings);
    CHECK(loaded.size() == 0);
    CHECK(warnings.size() == 1);
  }
  SUBCASE("corrupt file") {
    const char* bad[] = {
        "fingerprint=a precision=f16 shape=1x1x1 m_outer=64\n",
        "fingerprint=a precision=f99 shape=1x1x1 m_outer=64 m_inner=32 n_outer=64 n_inner=32 k_block=256 buffers=1\n",
        "fingerprint=a precision=f16 shape=1x1x1 m_outer=64 m_inner=48 n_outer=64 n_inner=32 k_block=256 buffers=1\n",
        "garbage\n",
    };
    for (const char* text : bad) {
      CAPTURE(text);
      std::istringstream is(text);
      std::vector<std::string> warnings;
      CHECK(TunedStore::parse(is, &warnings).size() == 0);
      CHECK(warnings.size() == 1);
    }
  }
  SUBCASE("comments and blank lines") {
    std::istringstream is(
        "# tuned\n\n"
        "fingerprint=a precision=b1 shape=2x2x64 m_outer=16 m_inner=8 n_outer=16 n_inner=8 k_block=512 buffers=1\n");
    CHECK(TunedStore::parse(is).size() == 1);
  }
  SUBCASE("file round trip") {
    const auto path = std::filesystem::temp_directory_path() / "rpbf_store_test.txt";
    store.save(path);
    CHECK(TunedStore::load(path) == store);
    std::filesystem::remove(path);
  }
}
