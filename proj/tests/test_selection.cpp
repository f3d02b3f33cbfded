#include <doctest.h>

#include <fstream>
#include <omp.h>

#include "elvis/error.hpp"
#include "elvis/selection.hpp"
#include "support.hpp"

using namespace elvis;
using namespace elvis::test;

namespace {

RealTensor random_tensor(int rows, int cols, int frames, std::mt19937& rng) {
  RealTensor t(rows, cols, frames);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double& v : t.values()) v = u(rng);
  return t;
}

MaskTensor random_mask(int rows, int cols, int frames, std::mt19937& rng, double p = 0.2) {
  MaskTensor m(rows, cols, frames);
  std::bernoulli_distribution b(p);
  for (auto& v : m.values()) v = b(rng);
  return m;
}

RealTensor one_row(std::vector<double> v) {
  RealTensor t(1, int(v.size()), 1);
  for (std::size_t j = 0; j < v.size(); ++j) t(0, int(j), 0) = v[j];
  return t;
}

}  // namespace

TEST_CASE("importance mixes spatial and temporal") {
  const std::vector<double> s{0.8, 0.2}, t{0.4, 0.6};
  CHECK(importance(s, t, 1.0, false) == s);
  CHECK(importance(s, t, 0.0, false) == t);
  CHECK(importance(s, t, 0.25, false)[0] == doctest::Approx(0.5));
  CHECK(importance(s, t, 0.0, true) == s);
  CHECK_THROWS_AS(importance(s, std::vector<double>{1.0}, 0.5, false), Error);
}

TEST_CASE("saliency inversion") {
  std::vector<double> c{0.6, 0.3, 0.0};
  const std::vector<std::uint8_t> none{0, 0, 0}, some{1, 0, 1};
  apply_saliency(c, none);
  CHECK(c == std::vector<double>{0.6, 0.3, 0.0});
  apply_saliency(c, some);
  CHECK(c[0] == -0.6);
  CHECK(c[1] == 0.3);
  CHECK(c[2] == 0.0);
  CHECK_FALSE(std::signbit(c[2]));
  CHECK_THROWS_AS(apply_saliency(c, std::vector<std::uint8_t>{1}), Error);
}

TEST_CASE("row smoothing") {
  const std::vector<double> cur{0.2, 0.4}, prev{0.6, 0.0};
  CHECK(smooth_row(cur, prev, 1.0) == cur);
  CHECK(smooth_row(cur, prev, 0.0) == prev);
  const auto half = smooth_row(cur, prev, 0.5);
  CHECK(half[0] == doctest::Approx(0.4));
  CHECK(half[1] == doctest::Approx(0.2));
  CHECK(smooth_row(cur, std::nullopt, 0.3) == cur);
  CHECK_THROWS_AS(smooth_row(cur, std::span<const double>(prev.data(), 1), 0.5), Error);
}

TEST_CASE("top-k prefers larger values then smaller indices") {
  const std::vector<double> row{0.5, 0.9, 0.5, 0.1, 0.9};
  CHECK(top_k_columns(row, 0).empty());
  CHECK(top_k_columns(row, 1) == std::vector<int>{1});
  CHECK(top_k_columns(row, 3) == std::vector<int>{0, 1, 4});
  CHECK(top_k_columns(row, 5) == std::vector<int>{0, 1, 2, 3, 4});
}

TEST_CASE("blocks per row floors r*J") {
  CHECK(blocks_per_row(0.0, 7) == 0);
  CHECK(blocks_per_row(0.25, 7) == 1);
  CHECK(blocks_per_row(0.3, 10) == 3);
  CHECK(blocks_per_row(0.5, 4) == 2);
  CHECK(blocks_per_row(1.0, 9) == 9);
  CHECK_THROWS_AS(blocks_per_row(1.5, 4), Error);
  CHECK_THROWS_AS(blocks_per_row(-0.1, 4), Error);
}

TEST_CASE("select_blocks worked examples") {
  const RealTensor s = one_row({0.9, 0.1, 0.5, 0.3});
  const RealTensor t(1, 4, 1);
  SUBCASE("r = 0") {
    const RemovalPlan p = select_blocks(s, t, MaskTensor(1, 4, 1), {0.5, 0.5, 0.0});
    CHECK(p.k() == 0);
    CHECK(p.removed(0, 0).empty());
  }
  SUBCASE("top two of the row") {
    const RemovalPlan p = select_blocks(s, t, MaskTensor(1, 4, 1), {0.5, 1.0, 0.5});
    CHECK(p.removed(0, 0) == std::vector<int>{0, 2});
  }
  SUBCASE("masked column sinks") {
    MaskTensor m(1, 4, 1);
    m(0, 0, 0) = 1;
    const RemovalPlan p = select_blocks(s, t, m, {0.5, 1.0, 0.5});
    CHECK(p.removed(0, 0) == std::vector<int>{2, 3});
  }
}

TEST_CASE("smoothing reads the previous frame's inverted, unsmoothed row") {
  // Two frames, alpha = 1 so C = S. Frame 0 has column 0 masked.
  RealTensor s(1, 3, 3), t(1, 3, 3);
  const double f0[3] = {0.9, 0.75, 0.0}, f1[3] = {0.0, 0.5, 0.75}, f2[3] = {0.3, 0.3, 0.3};
  for (int j = 0; j < 3; ++j) s(0, j, 0) = f0[j], s(0, j, 1) = f1[j], s(0, j, 2) = f2[j];
  MaskTensor m(1, 3, 3);
  m(0, 0, 0) = 1;
  const RemovalPlan p = select_blocks(s, t, m, {1.0, 0.5, 1.0 / 3});
  // frame 0: [-0.9, 0.75, 0] -> col 1
  CHECK(p.removed(0, 0) == std::vector<int>{1});
  // frame 1: 0.5*[0, .5, .75] + 0.5*[-0.9, .75, 0] = [-0.45, 0.625, 0.375] -> col 1
  CHECK(p.removed(1, 0) == std::vector<int>{1});
  // frame 2 against frame 1's raw row: [.15, .4, .525] -> col 2.
  // Against the smoothed row it would be [-.075, .4625, .3375] -> col 1.
  CHECK(p.removed(2, 0) == std::vector<int>{2});
}

TEST_CASE("select_blocks validates inputs") {
  const RealTensor a(2, 3, 2), b(2, 4, 2);
  CHECK_THROWS_AS(select_blocks(a, b, MaskTensor(2, 3, 2), {}), Error);
  CHECK_THROWS_AS(select_blocks(a, a, MaskTensor(2, 3, 1), {}), Error);
  CHECK_THROWS_AS(select_blocks(a, a, MaskTensor(2, 3, 2), {0.5, 0.5, 1.2}), Error);
}

TEST_CASE("plan properties over random tensors") {
  std::mt19937 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const int rows = 1 + int(rng() % 5), cols = 2 + int(rng() % 12), frames = 1 + int(rng() % 6);
    const RealTensor s = random_tensor(rows, cols, frames, rng), t = random_tensor(rows, cols, frames, rng);
    const MaskTensor m = random_mask(rows, cols, frames, rng);
    const double r = std::uniform_real_distribution<double>(0.0, 0.99)(rng);
    const SelectionParams params{std::uniform_real_distribution<double>(0, 1)(rng),
                                 std::uniform_real_distribution<double>(0, 1)(rng), r};
    const RemovalPlan p = select_blocks(s, t, m, params);
    const int k = int(std::floor(r * cols + 1e-9));
    CHECK(p.k() == k);
    for (int n = 0; n < frames; ++n)
      for (int i = 0; i < rows; ++i) {
        const auto& cols_removed = p.removed(n, i);
        REQUIRE(int(cols_removed.size()) == k);
        CHECK(std::is_sorted(cols_removed.begin(), cols_removed.end()));
        CHECK(std::adjacent_find(cols_removed.begin(), cols_removed.end()) == cols_removed.end());
      }

    // positive scaling of both tensors leaves the plan unchanged
    for (double c : {0.1, 0.5, 3.0}) {
      RealTensor s2 = s, t2 = t;
      for (double& v : s2.values()) v *= c;
      for (double& v : t2.values()) v *= c;
      CHECK(select_blocks(s2, t2, m, params) == p);
    }
    // mask round trip
    CHECK(RemovalPlan::from_mask(p.to_mask()) == p);
  }
}

TEST_CASE("beta = 1 makes frames independent of earlier content") {
  std::mt19937 rng(22);
  const RealTensor s = random_tensor(3, 8, 4, rng), t = random_tensor(3, 8, 4, rng);
  const MaskTensor m = random_mask(3, 8, 4, rng);
  const RemovalPlan p = select_blocks(s, t, m, {0.4, 1.0, 0.5});
  RealTensor s2 = s, t2 = t;
  for (int n = 0; n < 2; ++n)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 8; ++j) s2(i, j, n) = 1.0 - s(i, j, n), t2(i, j, n) = 0.5 * t(i, j, n);
  const RemovalPlan q = select_blocks(s2, t2, m, {0.4, 1.0, 0.5});
  for (int i = 0; i < 3; ++i) {
    CHECK(q.removed(2, i) == p.removed(2, i));
    CHECK(q.removed(3, i) == p.removed(3, i));
  }
}

TEST_CASE("foreground blocks survive when enough background exists") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    RealTensor s = random_tensor(4, 10, 3, rng), t = random_tensor(4, 10, 3, rng);
    for (double& v : s.values()) v = 0.01 + v;  // strictly positive
    const MaskTensor m = random_mask(4, 10, 3, rng, 0.3);
    const RemovalPlan p = select_blocks(s, t, m, {0.5, 1.0, 0.3});
    for (int n = 0; n < 3; ++n)
      for (int i = 0; i < 4; ++i) {
        int background = 0;
        for (int j = 0; j < 10; ++j) background += !m(i, j, n);
        if (background < p.k()) continue;
        for (int j : p.removed(n, i)) CHECK(m(i, j, n) == 0);
      }
  }
}

TEST_CASE("selection is deterministic across thread counts") {
  std::mt19937 rng(24);
  const RealTensor s = random_tensor(9, 20, 5, rng), t = random_tensor(9, 20, 5, rng);
  const MaskTensor m = random_mask(9, 20, 5, rng);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const RemovalPlan one = select_blocks(s, t, m, {0.3, 0.7, 0.4});
  omp_set_num_threads(4);
  const RemovalPlan four = select_blocks(s, t, m, {0.3, 0.7, 0.4});
  omp_set_num_threads(saved);
  CHECK(one == four);
}

TEST_CASE("removal plan validation") {
  RemovalPlan p(2, 5, 1, 2);
  CHECK_THROWS_AS(p.set_removed(0, 0, {1}), Error);
  CHECK_THROWS_AS(p.set_removed(0, 0, {1, 1}), Error);
  CHECK_THROWS_AS(p.set_removed(0, 0, {1, 5}), Error);
  CHECK_THROWS_AS(p.set_removed(0, 2, {1, 2}), Error);
  CHECK_THROWS_AS(RemovalPlan(2, 5, 1, 6), Error);
  p.set_removed(0, 1, {4, 0});
  CHECK(p.removed(0, 1) == std::vector<int>{0, 4});
  CHECK(p.removed_fraction() == doctest::Approx(0.4));
}

TEST_CASE("plan csv export") {
  TempDir dir;
  RemovalPlan p(1, 4, 2, 2);
  p.set_removed(0, 0, {0, 3});
  p.set_removed(1, 0, {1, 2});
  write_plan_csv(p, dir / "plan.csv");
  std::ifstream in(dir / "plan.csv");
  std::string header, a, b;
  std::getline(in, header);
  std::getline(in, a);
  std::getline(in, b);
  CHECK(header == "frame,row,cols");
  CHECK(a == "0,0,0;3");
  CHECK(b == "1,0,1;2");
}
