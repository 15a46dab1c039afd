#include "sqzcomb/trace_io.hpp"
#include "sqzcomb/trace_synth.hpp"

#include "../support.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <cstring>
#include <limits>

using namespace sqzcomb;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "sqzcomb_trace_io_test";
  fs::create_directories(dir);
  return dir / name;
}

std::vector<char> bytes_of(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const fs::path& p, const std::vector<char>& b) {
  std::ofstream(p, std::ios::binary | std::ios::trunc).write(b.data(), static_cast<std::streamsize>(b.size()));
}

}  // namespace

TEST_CASE("trace files round-trip bit for bit") {
  TraceConfig cfg;
  cfg.segment_count = 3;
  for (auto q : {Quadrature::phase, Quadrature::amplitude}) {
    cfg.quadrature = q;
    auto t = synthesize_trace(test::profile_params(), cfg);
    t.samples[0] = -0.0;
    t.samples[1] = std::numeric_limits<double>::denorm_min();
    const auto path = scratch("roundtrip.sqzt");
    write_trace(path, t);
    const auto r = read_trace(path);
    CHECK(r.quadrature == q);
    CHECK(r.sample_rate == t.sample_rate);
    REQUIRE(r.samples.size() == t.samples.size());
    CHECK(std::memcmp(r.samples.data(), t.samples.data(), 8 * t.samples.size()) == 0);
  }
  Trace empty;
  empty.sample_rate = 1e9;
  write_trace(scratch("empty.sqzt"), empty);
  CHECK(read_trace(scratch("empty.sqzt")).samples.empty());
}

TEST_CASE("trace file header layout is little-endian") {
  Trace t;
  t.sample_rate = 1.0;
  t.samples = {2.0};
  t.quadrature = Quadrature::phase;
  write_trace(scratch("layout.sqzt"), t);
  const auto b = bytes_of(scratch("layout.sqzt"));
  REQUIRE(b.size() == 25u + 8u);
  CHECK(std::string(b.begin(), b.begin() + 4) == "SQZT");
  CHECK(b[4] == 1);
  CHECK(b[5] == 0);
  // 1.0 = 0x3FF0000000000000
  CHECK(static_cast<unsigned char>(b[15]) == 0x3F);
  CHECK(static_cast<unsigned char>(b[14]) == 0xF0);
  CHECK(b[16] == 1);
  CHECK(b[17] == 1);
  // 2.0 = 0x4000000000000000
  CHECK(static_cast<unsigned char>(b[32]) == 0x40);
}

TEST_CASE("corrupt trace files are rejected") {
  Trace t;
  t.sample_rate = 1e9;
  t.samples = {1.0, 2.0, 3.0};
  const auto good = scratch("good.sqzt");
  write_trace(good, t);
  const auto bytes = bytes_of(good);
  const auto bad = scratch("bad.sqzt");

  SUBCASE("truncated payload") {
    write_bytes(bad, {bytes.begin(), bytes.end() - 3});
    CHECK_THROWS_WITH_AS(read_trace(bad), doctest::Contains("truncated"), TraceFormatError);
  }
  SUBCASE("truncated header") {
    write_bytes(bad, {bytes.begin(), bytes.begin() + 10});
    CHECK_THROWS_AS(read_trace(bad), TraceFormatError);
  }
  SUBCASE("bad magic names expected and found") {
    auto b = bytes;
    b[0] = 'X';
    write_bytes(bad, b);
    CHECK_THROWS_WITH_AS(read_trace(bad), doctest::Contains("expected \"SQZT\", found \"XQZT\""),
                         TraceFormatError);
  }
  SUBCASE("unsupported version") {
    auto b = bytes;
    b[4] = 7;
    write_bytes(bad, b);
    CHECK_THROWS_WITH_AS(read_trace(bad), doctest::Contains("expected 1, found 7"), UnsupportedVersionError);
  }
  SUBCASE("trailing bytes") {
    auto b = bytes;
    b.push_back(0);
    write_bytes(bad, b);
    CHECK_THROWS_AS(read_trace(bad), TraceFormatError);
  }
  SUBCASE("invalid quadrature tag") {
    auto b = bytes;
    b[16] = 9;
    write_bytes(bad, b);
    CHECK_THROWS_AS(read_trace(bad), TraceFormatError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(read_trace(scratch("does_not_exist.sqzt")), std::runtime_error);
  }
}
