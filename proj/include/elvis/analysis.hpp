#pragma once

#include <filesystem>
#include <vector>

#include "elvis/frame.hpp"
#include "elvis/tensor.hpp"

namespace elvis {

// Per-block complexity of an aligned sequence; both tensors lie in [0,1].
struct ComplexityTensors {
  RealTensor spatial;   // S
  RealTensor temporal;  // T; the last frame is stored as 0
  int block_size = 0;
};

enum class MaskSource { none, file, motion_heuristic };

struct SaliencyMask {
  MaskTensor m;  // 1 = foreground
  MaskSource provenance = MaskSource::none;
};

inline constexpr double kDefaultMaskCoverage = 0.25;
inline constexpr double kDefaultMotionQuantile = 0.75;

// Mean Sobel gradient magnitude on luma (edge-replicated borders), divided by
// the maximum attainable magnitude 4*255*sqrt(2).
RealTensor spatial_complexity(const FrameSequence& seq, int block_size);

// Mean absolute luma difference to the next frame, divided by 255.
RealTensor temporal_complexity(const FrameSequence& seq, int block_size);

ComplexityTensors analyze_complexity(const FrameSequence& seq, int block_size);

// A block is foreground when at least `coverage` of its mask pixels are nonzero.
// Mask frames may match either the aligned or the original geometry; the latter
// are edge-padded.
SaliencyMask block_mask(const FrameSequence& pixel_masks, const BlockGeometry& geometry,
                        double coverage = kDefaultMaskCoverage);

// Reads `%05d.png` masks for every frame of the geometry.
SaliencyMask load_masks(const std::filesystem::path& dir, const BlockGeometry& geometry,
                        double coverage = kDefaultMaskCoverage);

// Flags blocks whose temporal complexity strictly exceeds the per-frame quantile.
// The last frame repeats the previous frame's mask.
SaliencyMask motion_saliency(const RealTensor& temporal, double quantile = kDefaultMotionQuantile);
SaliencyMask motion_saliency(const FrameSequence& seq, int block_size,
                             double quantile = kDefaultMotionQuantile);

SaliencyMask empty_saliency(int rows, int cols, int frames);

// Linear-interpolation quantile of the values (q in [0,1]).
double quantile(std::vector<double> values, double q);

// One line per (frame, block-row), J comma-separated values.
void write_tensor_csv(const RealTensor& tensor, const std::filesystem::path& file);
void write_tensor_csv(const MaskTensor& tensor, const std::filesystem::path& file);

namespace reference {
// Single-threaded, pixel-at-a-time versions kept as test oracles and bench baselines.
RealTensor spatial_complexity(const FrameSequence& seq, int block_size);
RealTensor temporal_complexity(const FrameSequence& seq, int block_size);
}  // namespace reference

}  // namespace elvis
