#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "elvis/frame.hpp"
#include "elvis/tensor.hpp"

namespace elvis {

enum class InpaintBackend { diffusion, temporal_copy, external };

InpaintBackend parse_inpaint_backend(const std::string& name);
std::string to_string(InpaintBackend backend);

// Stretched frames plus the block mask of placeholders to fill (1 = fill).
struct InpaintRequest {
  FrameSequence frames;
  MaskTensor masks;
  int block_size = 0;

  // Throws unless frames and masks agree in count and geometry.
  void validate() const;
};

struct DiffusionOptions {
  double tol = 1e-3;  // max per-pixel change, intensity normalized to [0,1]
  int max_iters = 500;
};

struct ExternalInpainter {
  std::string command;  // `{frames}`, `{masks}`, `{out}` are substituted
  std::filesystem::path workdir;
};

// Harmonic fill: masked pixels relax to the mean of their in-frame 4-neighbours
// with known pixels held fixed. Frames run in parallel; each frame uses a
// red-black Gauss-Seidel sweep.
FrameSequence inpaint_diffusion(const InpaintRequest& request, const DiffusionOptions& options = {});

// Copies each missing block from the nearest frame (earlier on ties) where it
// is present; blocks missing everywhere fall back to diffusion.
FrameSequence inpaint_temporal_copy(const InpaintRequest& request, const DiffusionOptions& fallback = {});

// Runs an external tool over frames/, masks/ (white = fill) and reads results/.
FrameSequence inpaint_external(const InpaintRequest& request, const ExternalInpainter& tool);

// Expands a block mask to one byte per pixel (255 = fill).
std::vector<std::uint8_t> pixel_mask(const MaskTensor& masks, int frame, int block_size, int width, int height);

namespace reference {
// Same fixed point as inpaint_diffusion, visited in raster order on one thread.
FrameSequence inpaint_diffusion(const InpaintRequest& request, const DiffusionOptions& options = {});
}  // namespace reference

namespace detail {
enum class SweepOrder { raster, red_black };
// Fills masked pixels of one frame in place; returns iterations performed.
int diffuse_frame(Frame& frame, const std::vector<std::uint8_t>& mask, const DiffusionOptions& options,
                  SweepOrder order);
}  // namespace detail

}  // namespace elvis
