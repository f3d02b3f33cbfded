#include "elvis/inpaint.hpp"

namespace elvis::reference {

FrameSequence inpaint_diffusion(const InpaintRequest& req, const DiffusionOptions& opt) {
  req.validate();
  FrameSequence out = req.frames;
  for (int n = 0; n < out.size(); ++n)
    detail::diffuse_frame(out.frames[n], pixel_mask(req.masks, n, req.block_size, out.width(), out.height()),
                          opt, detail::SweepOrder::raster);
  return out;
}

}  // namespace elvis::reference
