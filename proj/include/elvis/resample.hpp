#pragma once

#include <span>
#include <utility>
#include <vector>

#include "elvis/frame.hpp"
#include "elvis/selection.hpp"

namespace elvis {

// Placeholder colour written into removed blocks.
inline constexpr std::uint8_t kPlaceholderValue = 0;

struct StretchedFrame {
  Frame frame;
  std::vector<std::pair<int, int>> placeholder_positions;  // (block row, block col)
};

// Drops the listed block columns from each block-row and packs the survivors
// left-to-right. Output width is (J - k) * block_size.
Frame shrink_frame(const Frame& frame, std::span<const std::vector<int>> row_sets, int block_size);

// Reinserts black blocks at the listed columns. original_width is the aligned
// width of the frame before shrinking.
StretchedFrame stretch_frame(const Frame& shrunk, std::span<const std::vector<int>> row_sets,
                             int block_size, int original_width);

// Whole-sequence versions, one frame per OpenMP task.
FrameSequence shrink_sequence(const FrameSequence& seq, const RemovalPlan& plan, int block_size);
FrameSequence stretch_sequence(const FrameSequence& shrunk, const RemovalPlan& plan, int block_size);

namespace reference {
FrameSequence shrink_sequence(const FrameSequence& seq, const RemovalPlan& plan, int block_size);
FrameSequence stretch_sequence(const FrameSequence& shrunk, const RemovalPlan& plan, int block_size);
}  // namespace reference

}  // namespace elvis
