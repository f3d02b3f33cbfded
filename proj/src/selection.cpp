#include "elvis/selection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "elvis/error.hpp"

namespace elvis {

RemovalPlan::RemovalPlan(int rows, int cols, int frames, int k)
    : rows_(rows), cols_(cols), frames_(frames), k_(k), removed_(std::size_t(rows) * frames) {
  if (rows < 0 || cols < 0 || frames < 0) throw Error("negative plan geometry");
  if (k < 0 || k > cols) throw Error("blocks per row must lie in [0, J]");
}

void RemovalPlan::set_removed(int n, int i, std::vector<int> cols) {
  if (n < 0 || n >= frames_ || i < 0 || i >= rows_) throw Error("plan row out of range");
  if (int(cols.size()) != k_) throw Error("row removes a different number of blocks than k");
  std::sort(cols.begin(), cols.end());
  for (std::size_t a = 0; a < cols.size(); ++a) {
    if (cols[a] < 0 || cols[a] >= cols_) throw Error("removed column out of range");
    if (a && cols[a] == cols[a - 1]) throw Error("duplicate removed column");
  }
  removed_[index(n, i)] = std::move(cols);
}

MaskTensor RemovalPlan::to_mask() const {
  MaskTensor o(rows_, cols_, frames_);
  for (int n = 0; n < frames_; ++n)
    for (int i = 0; i < rows_; ++i)
      for (int j : removed(n, i)) o(i, j, n) = 1;
  return o;
}

RemovalPlan RemovalPlan::from_mask(const MaskTensor& mask) {
  int k = -1;
  for (int n = 0; n < mask.frames() && k < 0; ++n)
    for (int i = 0; i < mask.rows() && k < 0; ++i) {
      const auto row = mask.row(i, n);
      k = int(std::count_if(row.begin(), row.end(), [](auto v) { return v != 0; }));
    }
  RemovalPlan plan(mask.rows(), mask.cols(), mask.frames(), std::max(k, 0));
  for (int n = 0; n < mask.frames(); ++n) {
    for (int i = 0; i < mask.rows(); ++i) {
      std::vector<int> cols;
      const auto row = mask.row(i, n);
      for (int j = 0; j < mask.cols(); ++j)
        if (row[j]) cols.push_back(j);
      plan.set_removed(n, i, std::move(cols));
    }
  }
  return plan;
}

int blocks_per_row(double r, int cols) {
  if (!(r >= 0.0 && r <= 1.0)) throw Error("removed fraction must lie in [0,1]");
  // Guard against r*J landing a hair below an integer, e.g. 0.3*10.
  return std::min(cols, int(std::floor(r * cols + 1e-9)));
}

std::vector<double> importance(std::span<const double> s, std::span<const double> t, double alpha,
                               bool is_last_frame) {
  if (s.size() != t.size()) throw Error("importance: shape mismatch");
  std::vector<double> c(s.begin(), s.end());
  if (is_last_frame) return c;
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = alpha * s[k] + (1.0 - alpha) * t[k];
  return c;
}

void apply_saliency(std::span<double> c, std::span<const std::uint8_t> m) {
  if (c.size() != m.size()) throw Error("apply_saliency: shape mismatch");
  for (std::size_t k = 0; k < c.size(); ++k)
    if (m[k]) c[k] = c[k] == 0.0 ? 0.0 : -c[k];
}

std::vector<double> smooth_row(std::span<const double> current,
                               std::optional<std::span<const double>> previous, double beta) {
  std::vector<double> row(current.begin(), current.end());
  if (!previous) return row;
  if (previous->size() != current.size()) throw Error("smooth_row: length mismatch");
  for (std::size_t j = 0; j < row.size(); ++j) row[j] = beta * row[j] + (1.0 - beta) * (*previous)[j];
  return row;
}

std::vector<int> top_k_columns(std::span<const double> row, int k) {
  std::vector<int> order(row.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return row[a] > row[b]; });
  order.resize(std::size_t(std::clamp<int>(k, 0, int(row.size()))));
  std::sort(order.begin(), order.end());
  return order;
}

RemovalPlan select_blocks(const RealTensor& s, const RealTensor& t, const MaskTensor& m,
                          const SelectionParams& p) {
  if (!s.same_shape(t) || !s.same_shape(m)) throw Error("select_blocks: geometry mismatch");
  if (!(p.alpha >= 0 && p.alpha <= 1) || !(p.beta >= 0 && p.beta <= 1))
    throw Error("alpha and beta must lie in [0,1]");
  const int rows = s.rows(), cols = s.cols(), frames = s.frames();
  const int k = blocks_per_row(p.removed_fraction, cols);
  RemovalPlan plan(rows, cols, frames, k);
  if (k == 0) return plan;

  // Frame n smooths against frame n-1 after inversion but before smoothing, so
  // the inverted importance of the previous frame is all that is carried over.
  std::vector<double> previous;
  for (int n = 0; n < frames; ++n) {
    std::vector<double> c = importance(s.frame(n), t.frame(n), p.alpha, n == frames - 1);
    apply_saliency(c, m.frame(n));
#pragma omp parallel for schedule(static)
    for (int i = 0; i < rows; ++i) {
      const std::span<const double> cur(c.data() + std::size_t(i) * cols, cols);
      std::optional<std::span<const double>> prev;
      if (n > 0) prev = std::span<const double>(previous.data() + std::size_t(i) * cols, cols);
      plan.set_removed(n, i, top_k_columns(smooth_row(cur, prev, p.beta), k));
    }
    previous = std::move(c);
  }
  return plan;
}

void write_plan_csv(const RemovalPlan& plan, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  out << "frame,row,cols\n";
  for (int n = 0; n < plan.frames(); ++n) {
    for (int i = 0; i < plan.rows(); ++i) {
      out << n << ',' << i << ',';
      const auto& cols = plan.removed(n, i);
      for (std::size_t a = 0; a < cols.size(); ++a) out << (a ? ";" : "") << cols[a];
      out << '\n';
    }
  }
}

}  // namespace elvis
