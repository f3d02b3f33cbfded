#include <doctest.h>

#include <omp.h>

#include "elvis/error.hpp"
#include "elvis/resample.hpp"
#include "support.hpp"

using namespace elvis;
using namespace elvis::test;

namespace {

Frame painted_blocks(const std::vector<std::uint8_t>& values, int b) {
  Frame f(int(values.size()) * b, b);
  for (int y = 0; y < b; ++y)
    for (int x = 0; x < f.width(); ++x)
      for (int c = 0; c < 3; ++c) f.at(x, y, c) = values[x / b];
  return f;
}

bool block_is(const Frame& f, int i, int j, int b, const Frame& src, int si, int sj) {
  for (int y = 0; y < b; ++y)
    for (int x = 0; x < b; ++x)
      for (int c = 0; c < 3; ++c)
        if (f.at(j * b + x, i * b + y, c) != src.at(sj * b + x, si * b + y, c)) return false;
  return true;
}

bool block_black(const Frame& f, int i, int j, int b) {
  for (int y = 0; y < b; ++y)
    for (int x = 0; x < b; ++x)
      for (int c = 0; c < 3; ++c)
        if (f.at(j * b + x, i * b + y, c) != kPlaceholderValue) return false;
  return true;
}

}  // namespace

TEST_CASE("empty plan is the identity") {
  std::mt19937 rng(31);
  const Frame f = random_frame(64, 32, rng);
  const std::vector<std::vector<int>> rows(2);
  CHECK(shrink_frame(f, rows, 16) == f);
  const StretchedFrame s = stretch_frame(f, rows, 16, 64);
  CHECK(s.frame == f);
  CHECK(s.placeholder_positions.empty());
}

TEST_CASE("kept blocks are packed in order") {
  const Frame f = painted_blocks({10, 20, 30, 40}, 8);
  const std::vector<std::vector<int>> rows{{1, 3}};
  const Frame out = shrink_frame(f, rows, 8);
  CHECK(out.width() == 16);
  CHECK(out.at(0, 0, 0) == 10);
  CHECK(out.at(8, 0, 0) == 30);
}

TEST_CASE("width arithmetic") {
  std::mt19937 rng(32);
  const Frame f = random_frame(256, 64, rng);
  const std::vector<std::vector<int>> rows{{2}};
  const Frame out = shrink_frame(f, rows, 64);
  CHECK(out.width() == 192);
  CHECK(out.height() == 64);
}

TEST_CASE("shrink validates row sets") {
  std::mt19937 rng(33);
  const Frame f = random_frame(64, 32, rng);
  CHECK_THROWS_AS(shrink_frame(f, std::vector<std::vector<int>>{{1}, {1, 2}}, 16), Error);
  CHECK_THROWS_AS(shrink_frame(f, std::vector<std::vector<int>>{{4}, {1}}, 16), Error);
  CHECK_THROWS_AS(shrink_frame(f, std::vector<std::vector<int>>{{1}}, 16), Error);
  CHECK_THROWS_AS(shrink_frame(random_frame(60, 32, rng), std::vector<std::vector<int>>{{1}, {1}}, 16), Error);
}

TEST_CASE("stretch rejects a wrong width") {
  std::mt19937 rng(34);
  const std::vector<std::vector<int>> rows{{0}, {3}};
  CHECK_THROWS_WITH_AS(stretch_frame(random_frame(64, 32, rng), rows, 16, 64), doctest::Contains("shrunk width"),
                       Error);
}

TEST_CASE("round trip restores kept blocks and blanks removed ones") {
  std::mt19937 rng(35);
  for (int trial = 0; trial < 25; ++trial) {
    const int b = 8 << (rng() % 3);
    const int rows = 1 + int(rng() % 4), cols = 2 + int(rng() % 7);
    const int k = int(rng() % cols);
    const Frame f = random_frame(cols * b, rows * b, rng);
    const RemovalPlan plan = random_plan(rows, cols, 1, k, rng);
    const StretchedFrame s = stretch_frame(shrink_frame(f, plan.frame_rows(0), b), plan.frame_rows(0), b, cols * b);
    REQUIRE(s.frame.width() == f.width());
    CHECK(int(s.placeholder_positions.size()) == rows * k);
    for (int i = 0; i < rows; ++i) {
      const auto& gone = plan.removed(0, i);
      for (int j = 0; j < cols; ++j) {
        const bool removed = std::find(gone.begin(), gone.end(), j) != gone.end();
        if (removed) {
          CHECK(block_black(s.frame, i, j, b));
          CHECK(std::find(s.placeholder_positions.begin(), s.placeholder_positions.end(), std::pair{i, j}) !=
                s.placeholder_positions.end());
        } else {
          CHECK(block_is(s.frame, i, j, b, f, i, j));
        }
      }
    }
  }
}

TEST_CASE("parallel and serial sequence versions agree") {
  std::mt19937 rng(36);
  const FrameSequence seq = random_sequence(128, 64, 9, rng);
  const RemovalPlan plan = random_plan(4, 8, 9, 3, rng);
  const int saved = omp_get_max_threads();
  for (int threads : {1, 3}) {
    omp_set_num_threads(threads);
    const FrameSequence shrunk = shrink_sequence(seq, plan, 16);
    CHECK(shrunk.frames == reference::shrink_sequence(seq, plan, 16).frames);
    CHECK(shrunk.width() == 80);
    const FrameSequence back = stretch_sequence(shrunk, plan, 16);
    CHECK(back.frames == reference::stretch_sequence(shrunk, plan, 16).frames);
  }
  omp_set_num_threads(saved);
  CHECK_THROWS_AS(shrink_sequence(seq, random_plan(4, 8, 8, 3, rng), 16), Error);
}
