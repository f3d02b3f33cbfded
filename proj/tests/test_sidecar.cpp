#include <doctest.h>

#include <zlib.h>

#include "elvis/error.hpp"
#include "elvis/sidecar.hpp"
#include "support.hpp"

using namespace elvis;
using namespace elvis::test;

namespace {

// Independent bit packing of the mask, for checking the payload.
std::vector<std::uint8_t> packed_rows(const RemovalPlan& p) {
  const int row_bytes = (p.cols() + 7) / 8;
  std::vector<std::uint8_t> out;
  for (int n = 0; n < p.frames(); ++n)
    for (int i = 0; i < p.rows(); ++i) {
      std::vector<std::uint8_t> row(row_bytes, 0);
      for (int j : p.removed(n, i)) row[j / 8] |= std::uint8_t(0x80 >> (j % 8));
      out.insert(out.end(), row.begin(), row.end());
    }
  return out;
}

std::vector<std::uint8_t> inflate_raw(const std::uint8_t* data, std::size_t size, std::size_t expected) {
  std::vector<std::uint8_t> out(expected + 16);
  z_stream z{};
  inflateInit2(&z, -15);
  z.next_in = const_cast<Bytef*>(data);
  z.avail_in = uInt(size);
  z.next_out = out.data();
  z.avail_out = uInt(out.size());
  const int rc = inflate(&z, Z_FINISH);
  inflateEnd(&z);
  REQUIRE(rc == Z_STREAM_END);
  out.resize(z.total_out);
  return out;
}

}  // namespace

TEST_CASE("header layout") {
  RemovalPlan p(3, 5, 2, 1);
  for (int n = 0; n < 2; ++n)
    for (int i = 0; i < 3; ++i) p.set_removed(n, i, {i});
  const SidecarGeometry g{70, 40, 16, 2};
  const auto bytes = encode_sidecar(p, g);
  REQUIRE(bytes.size() > kSidecarHeaderSize);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "ELVS");
  CHECK(bytes[4] == kSidecarVersion);
  CHECK((bytes[5] << 8 | bytes[6]) == 70);
  CHECK((bytes[7] << 8 | bytes[8]) == 40);
  CHECK((bytes[9] << 8 | bytes[10]) == 16);
  CHECK((std::uint32_t(bytes[11]) << 24 | bytes[12] << 16 | bytes[13] << 8 | bytes[14]) == 2u);
  CHECK((bytes[15] << 8 | bytes[16]) == 1);
  const auto payload = inflate_raw(bytes.data() + kSidecarHeaderSize, bytes.size() - kSidecarHeaderSize, 6);
  CHECK(payload == packed_rows(p));
}

TEST_CASE("zero mask round trip") {
  const RemovalPlan p(4, 4, 10, 0);
  const auto bytes = encode_sidecar(p, {64, 64, 16, 10});
  const DecodedSidecar d = decode_sidecar(bytes);
  CHECK(d.plan == p);
  CHECK(d.plan.k() == 0);
  CHECK(d.geometry == SidecarGeometry{64, 64, 16, 10});
}

TEST_CASE("random plans round trip") {
  std::mt19937 rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const int b = 8 << (rng() % 4);
    const int w = 1 + int(rng() % 700), h = 1 + int(rng() % 300), frames = 1 + int(rng() % 12);
    const SidecarGeometry g{w, h, b, frames};
    const int k = int(rng() % g.cols());
    const RemovalPlan p = random_plan(g.rows(), g.cols(), frames, k, rng);
    const DecodedSidecar d = decode_sidecar(encode_sidecar(p, g));
    REQUIRE(d.plan == p);
    CHECK(d.geometry == g);
  }
}

TEST_CASE("all-zero masks compress well") {
  const SidecarGeometry g{1920, 1080, 8, 100};
  const RemovalPlan p(g.rows(), g.cols(), 100, 0);
  const auto bytes = encode_sidecar(p, g);
  const std::size_t one_frame_raw = std::size_t(g.rows()) * ((g.cols() + 7) / 8);
  CHECK(bytes.size() - kSidecarHeaderSize < one_frame_raw);
}

TEST_CASE("uniform masks never serialize larger than random ones") {
  std::mt19937 rng(42);
  const SidecarGeometry g{640, 368, 16, 20};
  const int k = 10;
  RemovalPlan uniform(g.rows(), g.cols(), g.frame_count, k);
  for (int n = 0; n < g.frame_count; ++n)
    for (int i = 0; i < g.rows(); ++i) uniform.set_removed(n, i, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  const RemovalPlan random = random_plan(g.rows(), g.cols(), g.frame_count, k, rng);
  CHECK(encode_sidecar(uniform, g).size() <= encode_sidecar(random, g).size());
}

TEST_CASE("corruption is detected") {
  std::mt19937 rng(43);
  const SidecarGeometry g{128, 64, 16, 4};
  const RemovalPlan p = random_plan(4, 8, 4, 2, rng);
  const auto good = encode_sidecar(p, g);

  SUBCASE("bad magic") {
    auto bad = good;
    bad[0] = 'X';
    CHECK_THROWS_WITH_AS(decode_sidecar(bad), doctest::Contains("bad magic"), Error);
  }
  SUBCASE("truncated header") {
    for (std::size_t cut = 0; cut < kSidecarHeaderSize; ++cut)
      CHECK_THROWS_WITH_AS(decode_sidecar(std::span(good.data(), cut)), doctest::Contains("truncated"), Error);
    const std::uint8_t wrong[] = {'E', 'L', 'x'};
    CHECK_THROWS_WITH_AS(decode_sidecar(wrong), doctest::Contains("bad magic"), Error);
  }
  SUBCASE("truncated payload") {
    for (std::size_t cut = kSidecarHeaderSize; cut < good.size(); ++cut)
      CHECK_THROWS_WITH_AS(decode_sidecar(std::span(good.data(), cut)), doctest::Contains("truncated"), Error);
  }
  SUBCASE("unknown version") {
    auto bad = good;
    bad[4] = 9;
    CHECK_THROWS_AS(decode_sidecar(bad), Error);
  }
  SUBCASE("popcount mismatch") {
    auto bad = good;
    bad[16] = 3;  // header claims k = 3, payload holds rows of 2
    CHECK_THROWS_AS(decode_sidecar(bad), Error);
  }
  SUBCASE("trailing bytes") {
    auto bad = good;
    bad.push_back(0);
    CHECK_THROWS_AS(decode_sidecar(bad), Error);
  }
  SUBCASE("plan and geometry disagree") {
    CHECK_THROWS_AS(encode_sidecar(p, {256, 64, 16, 4}), Error);
    CHECK_THROWS_AS(encode_sidecar(p, {128, 64, 16, 5}), Error);
  }
}

TEST_CASE("overhead ratio") {
  CHECK(sidecar_overhead(5000, 100000) == doctest::Approx(0.05));
  CHECK(sidecar_overhead(0, 100000) == 0.0);
  CHECK_THROWS_AS(sidecar_overhead(10, 0), Error);
}

TEST_CASE("sidecar files") {
  TempDir dir;
  std::mt19937 rng(44);
  const RemovalPlan p = random_plan(2, 4, 3, 1, rng);
  const auto bytes = encode_sidecar(p, {64, 32, 16, 3});
  write_sidecar_file(bytes, dir / "plan.elvs");
  CHECK(read_sidecar_file(dir / "plan.elvs") == bytes);
  CHECK_THROWS_AS(read_sidecar_file(dir / "missing.elvs"), Error);
}
