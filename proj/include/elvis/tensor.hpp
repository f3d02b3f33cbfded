#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "elvis/error.hpp"

namespace elvis {

// Per-block values over a sequence: rows (I) x cols (J) x frames (N).
// Storage is frame-major, then row, then column.
template <class T>
class BlockTensor {
 public:
  BlockTensor() = default;
  BlockTensor(int rows, int cols, int frames, T fill = T{})
      : rows_(rows), cols_(cols), frames_(frames),
        data_(static_cast<std::size_t>(rows) * cols * frames, fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int frames() const { return frames_; }

  T& operator()(int i, int j, int n) { return data_[index(i, j, n)]; }
  const T& operator()(int i, int j, int n) const { return data_[index(i, j, n)]; }

  std::span<T> frame(int n) { return {data_.data() + index(0, 0, n), plane()}; }
  std::span<const T> frame(int n) const { return {data_.data() + index(0, 0, n), plane()}; }
  std::span<T> row(int i, int n) { return {data_.data() + index(i, 0, n), std::size_t(cols_)}; }
  std::span<const T> row(int i, int n) const { return {data_.data() + index(i, 0, n), std::size_t(cols_)}; }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  template <class U>
  bool same_shape(const BlockTensor<U>& o) const {
    return rows_ == o.rows() && cols_ == o.cols() && frames_ == o.frames();
  }

  bool operator==(const BlockTensor&) const = default;

 private:
  std::size_t plane() const { return std::size_t(rows_) * cols_; }
  std::size_t index(int i, int j, int n) const { return (std::size_t(n) * rows_ + i) * cols_ + j; }

  int rows_ = 0;
  int cols_ = 0;
  int frames_ = 0;
  std::vector<T> data_;
};

using RealTensor = BlockTensor<double>;
using MaskTensor = BlockTensor<std::uint8_t>;

}  // namespace elvis
