#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "elvis/analysis.hpp"
#include "elvis/tensor.hpp"

namespace elvis {

// Blocks removed from every block-row of every frame. Each row lists exactly
// k distinct column indices in ascending order.
class RemovalPlan {
 public:
  RemovalPlan() = default;
  RemovalPlan(int rows, int cols, int frames, int k);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int frames() const { return frames_; }
  int k() const { return k_; }
  double removed_fraction() const { return cols_ ? double(k_) / cols_ : 0.0; }

  const std::vector<int>& removed(int n, int i) const { return removed_[index(n, i)]; }
  // Replaces a row; validates count, range, uniqueness and sorts.
  void set_removed(int n, int i, std::vector<int> cols);
  // All row sets of frame n, top to bottom.
  std::span<const std::vector<int>> frame_rows(int n) const {
    return {removed_.data() + index(n, 0), std::size_t(rows_)};
  }

  // Binary O tensor: 1 where a block was removed.
  MaskTensor to_mask() const;
  static RemovalPlan from_mask(const MaskTensor& mask);

  bool operator==(const RemovalPlan&) const = default;

 private:
  std::size_t index(int n, int i) const { return std::size_t(n) * rows_ + i; }

  int rows_ = 0;
  int cols_ = 0;
  int frames_ = 0;
  int k_ = 0;
  std::vector<std::vector<int>> removed_;
};

// floor(r * J); r must lie in [0,1].
int blocks_per_row(double removed_fraction, int cols);

// Weighted complexity of one frame; the last frame uses spatial only.
std::vector<double> importance(std::span<const double> spatial, std::span<const double> temporal,
                               double alpha, bool is_last_frame);

// Negates importance where the saliency mask is set.
void apply_saliency(std::span<double> importance, std::span<const std::uint8_t> mask);

// beta * current + (1 - beta) * previous; returns current when previous is absent.
std::vector<double> smooth_row(std::span<const double> current,
                               std::optional<std::span<const double>> previous, double beta);

// Indices of the k largest values; ties prefer the smaller index. Ascending.
std::vector<int> top_k_columns(std::span<const double> row, int k);

struct SelectionParams {
  double alpha = 0.5;
  double beta = 0.5;
  double removed_fraction = 0.25;
};

RemovalPlan select_blocks(const RealTensor& spatial, const RealTensor& temporal,
                          const MaskTensor& saliency, const SelectionParams& params);

// Debug export, one line per (frame,row): `frame,row,c0;c1;...`.
void write_plan_csv(const RemovalPlan& plan, const std::filesystem::path& file);

}  // namespace elvis
