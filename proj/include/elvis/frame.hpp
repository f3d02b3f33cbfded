#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace elvis {

struct FrameRate {
  int num = 30;
  int den = 1;
  double value() const { return static_cast<double>(num) / den; }
  bool operator==(const FrameRate&) const = default;
};

// Interleaved 8-bit RGB image, row-major.
class Frame {
 public:
  static constexpr int kChannels = 3;

  Frame() = default;
  Frame(int width, int height);  // all black
  Frame(int width, int height, std::vector<std::uint8_t> rgb);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return pixels_.empty(); }

  std::span<const std::uint8_t> pixels() const { return pixels_; }
  std::span<std::uint8_t> pixels() { return pixels_; }

  const std::uint8_t* row(int y) const { return pixels_.data() + std::size_t(y) * width_ * kChannels; }
  std::uint8_t* row(int y) { return pixels_.data() + std::size_t(y) * width_ * kChannels; }

  std::uint8_t at(int x, int y, int c) const { return row(y)[x * kChannels + c]; }
  std::uint8_t& at(int x, int y, int c) { return row(y)[x * kChannels + c]; }

  // BT.601 luma, round(0.299 R + 0.587 G + 0.114 B), one byte per pixel.
  std::vector<std::uint8_t> luma() const;

  bool operator==(const Frame&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

inline std::uint8_t luma_of(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  // Exact integer form of round-half-up on the real-valued weights.
  return static_cast<std::uint8_t>((299u * r + 587u * g + 114u * b + 500u) / 1000u);
}

struct FrameSequence {
  std::vector<Frame> frames;
  FrameRate frame_rate;
  int original_width = 0;   // before block-alignment padding
  int original_height = 0;

  int width() const { return frames.empty() ? 0 : frames.front().width(); }
  int height() const { return frames.empty() ? 0 : frames.front().height(); }
  int size() const { return static_cast<int>(frames.size()); }
  bool empty() const { return frames.empty(); }

  // Throws elvis::Error("inconsistent dimensions") when frames disagree.
  void check_uniform() const;
};

// Block grid of an aligned sequence.
struct BlockGeometry {
  int width = 0;   // aligned
  int height = 0;  // aligned
  int original_width = 0;
  int original_height = 0;
  int block_size = 0;
  int frame_count = 0;

  int rows() const { return height / block_size; }
  int cols() const { return width / block_size; }
  bool operator==(const BlockGeometry&) const = default;
};

// Requires the sequence to already be aligned to block_size.
BlockGeometry geometry_of(const FrameSequence& seq, int block_size);

}  // namespace elvis
