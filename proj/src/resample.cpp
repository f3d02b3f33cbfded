#include "elvis/resample.hpp"

#include <algorithm>
#include <cstring>

#include "elvis/error.hpp"

namespace elvis {

namespace {

// Column bitmap per block-row; validates that all rows remove the same count.
std::vector<std::vector<char>> removed_bitmap(std::span<const std::vector<int>> row_sets, int rows,
                                              int cols, int& k) {
  if (int(row_sets.size()) != rows) throw Error("plan rows do not match frame block rows");
  k = row_sets.empty() ? 0 : int(row_sets.front().size());
  std::vector<std::vector<char>> bitmap(rows, std::vector<char>(cols, 0));
  for (int i = 0; i < rows; ++i) {
    if (int(row_sets[i].size()) != k) throw Error("row sets of unequal size");
    for (int j : row_sets[i]) {
      if (j < 0 || j >= cols) throw Error("removed column out of range");
      if (bitmap[i][j]) throw Error("duplicate removed column");
      bitmap[i][j] = 1;
    }
  }
  return bitmap;
}

}  // namespace

Frame shrink_frame(const Frame& frame, std::span<const std::vector<int>> row_sets, int b) {
  if (b <= 0 || frame.width() % b || frame.height() % b) throw Error("frame is not block-aligned");
  const int rows = frame.height() / b, cols = frame.width() / b;
  int k = 0;
  const auto bitmap = removed_bitmap(row_sets, rows, cols, k);
  if (k == cols) throw Error("cannot remove every block of a row");
  Frame out((cols - k) * b, frame.height());
  const std::size_t block_bytes = std::size_t(b) * Frame::kChannels;
  for (int i = 0; i < rows; ++i) {
    for (int y = i * b; y < (i + 1) * b; ++y) {
      const std::uint8_t* src = frame.row(y);
      std::uint8_t* dst = out.row(y);
      for (int j = 0; j < cols; ++j) {
        if (bitmap[i][j]) continue;
        std::memcpy(dst, src + j * block_bytes, block_bytes);
        dst += block_bytes;
      }
    }
  }
  return out;
}

StretchedFrame stretch_frame(const Frame& shrunk, std::span<const std::vector<int>> row_sets, int b,
                             int original_width) {
  if (b <= 0 || original_width % b || shrunk.height() % b) throw Error("geometry is not block-aligned");
  const int rows = shrunk.height() / b, cols = original_width / b;
  int k = 0;
  const auto bitmap = removed_bitmap(row_sets, rows, cols, k);
  if (shrunk.width() != (cols - k) * b) throw Error("shrunk width does not match the plan");
  StretchedFrame out{Frame(original_width, shrunk.height()), {}};
  const std::size_t block_bytes = std::size_t(b) * Frame::kChannels;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j)
      if (bitmap[i][j]) out.placeholder_positions.emplace_back(i, j);
    for (int y = i * b; y < (i + 1) * b; ++y) {
      const std::uint8_t* src = shrunk.row(y);
      std::uint8_t* dst = out.frame.row(y);
      for (int j = 0; j < cols; ++j, dst += block_bytes) {
        if (bitmap[i][j]) {
          std::memset(dst, kPlaceholderValue, block_bytes);
        } else {
          std::memcpy(dst, src, block_bytes);
          src += block_bytes;
        }
      }
    }
  }
  return out;
}

namespace {
void check_plan(const FrameSequence& seq, const RemovalPlan& plan, int b) {
  if (seq.size() != plan.frames()) throw Error("plan frame count does not match the sequence");
  if (seq.height() != plan.rows() * b) throw Error("plan rows do not match the sequence height");
}

FrameSequence with_frames(const FrameSequence& like, std::vector<Frame> frames) {
  FrameSequence out;
  out.frame_rate = like.frame_rate;
  out.original_width = like.original_width;
  out.original_height = like.original_height;
  out.frames = std::move(frames);
  return out;
}
}  // namespace

FrameSequence shrink_sequence(const FrameSequence& seq, const RemovalPlan& plan, int b) {
  check_plan(seq, plan, b);
  std::vector<Frame> frames(seq.frames.size());
  // Exceptions must not escape an OpenMP region.
  std::vector<std::string> errors(seq.frames.size());
#pragma omp parallel for schedule(dynamic)
  for (int n = 0; n < seq.size(); ++n) {
    try {
      frames[n] = shrink_frame(seq.frames[n], plan.frame_rows(n), b);
    } catch (const std::exception& e) {
      errors[n] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw Error(e);
  return with_frames(seq, std::move(frames));
}

FrameSequence stretch_sequence(const FrameSequence& shrunk, const RemovalPlan& plan, int b) {
  check_plan(shrunk, plan, b);
  const int width = plan.cols() * b;
  std::vector<Frame> frames(shrunk.frames.size());
  std::vector<std::string> errors(shrunk.frames.size());
#pragma omp parallel for schedule(dynamic)
  for (int n = 0; n < shrunk.size(); ++n) {
    try {
      frames[n] = stretch_frame(shrunk.frames[n], plan.frame_rows(n), b, width).frame;
    } catch (const std::exception& e) {
      errors[n] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw Error(e);
  return with_frames(shrunk, std::move(frames));
}

}  // namespace elvis
