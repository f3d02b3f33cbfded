#include "elvis/frame.hpp"

#include "elvis/error.hpp"

namespace elvis {

Frame::Frame(int width, int height)
    : Frame(width, height, std::vector<std::uint8_t>(std::size_t(width) * height * kChannels, 0)) {}

Frame::Frame(int width, int height, std::vector<std::uint8_t> rgb)
    : width_(width), height_(height), pixels_(std::move(rgb)) {
  if (width <= 0 || height <= 0) throw Error("frame dimensions must be positive");
  if (pixels_.size() != std::size_t(width) * height * kChannels)
    throw Error("pixel buffer length does not match frame dimensions");
}

std::vector<std::uint8_t> Frame::luma() const {
  std::vector<std::uint8_t> y(std::size_t(width_) * height_);
  const std::uint8_t* p = pixels_.data();
  for (std::size_t k = 0; k < y.size(); ++k, p += kChannels) y[k] = luma_of(p[0], p[1], p[2]);
  return y;
}

void FrameSequence::check_uniform() const {
  for (const Frame& f : frames)
    if (f.width() != width() || f.height() != height()) throw Error("inconsistent dimensions");
}

BlockGeometry geometry_of(const FrameSequence& seq, int block_size) {
  if (block_size <= 0) throw Error("block size must be positive");
  if (seq.width() % block_size != 0 || seq.height() % block_size != 0)
    throw Error("sequence is not aligned to the block size");
  BlockGeometry g;
  g.width = seq.width();
  g.height = seq.height();
  g.original_width = seq.original_width > 0 ? seq.original_width : seq.width();
  g.original_height = seq.original_height > 0 ? seq.original_height : seq.height();
  g.block_size = block_size;
  g.frame_count = seq.size();
  return g;
}

}  // namespace elvis
