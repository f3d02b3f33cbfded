#include "elvis/inpaint.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "elvis/error.hpp"
#include "elvis/media_io.hpp"
#include "elvis/subprocess.hpp"

namespace fs = std::filesystem;

namespace elvis {

InpaintBackend parse_inpaint_backend(const std::string& name) {
  if (name == "diffusion") return InpaintBackend::diffusion;
  if (name == "temporal-copy") return InpaintBackend::temporal_copy;
  if (name == "external" || name.rfind("external:", 0) == 0) return InpaintBackend::external;
  throw Error("unknown in-painter: " + name);
}

std::string to_string(InpaintBackend b) {
  switch (b) {
    case InpaintBackend::diffusion: return "diffusion";
    case InpaintBackend::temporal_copy: return "temporal-copy";
    case InpaintBackend::external: return "external";
  }
  return "?";
}

void InpaintRequest::validate() const {
  if (frames.size() != masks.frames()) throw Error("frame and mask counts differ");
  if (block_size <= 0 || frames.width() != masks.cols() * block_size ||
      frames.height() != masks.rows() * block_size)
    throw Error("frame and mask geometry differ");
  frames.check_uniform();
}

std::vector<std::uint8_t> pixel_mask(const MaskTensor& masks, int n, int b, int width, int height) {
  std::vector<std::uint8_t> m(std::size_t(width) * height, 0);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      if (masks(y / b, x / b, n)) m[std::size_t(y) * width + x] = 255;
  return m;
}

namespace detail {

int diffuse_frame(Frame& frame, const std::vector<std::uint8_t>& mask, const DiffusionOptions& opt,
                  SweepOrder order) {
  const int w = frame.width(), h = frame.height();
  std::vector<int> unknown;
  if (order == SweepOrder::raster) {
    for (int k = 0; k < w * h; ++k)
      if (mask[k]) unknown.push_back(k);
  } else {
    for (int parity = 0; parity < 2; ++parity)
      for (int y = 0; y < h; ++y)
        for (int x = (y + parity) % 2; x < w; x += 2)
          if (mask[std::size_t(y) * w + x]) unknown.push_back(y * w + x);
  }
  if (unknown.empty()) return 0;

  // Planar working copy in [0,1].
  std::vector<double> v(std::size_t(w) * h * 3);
  for (std::size_t k = 0; k < std::size_t(w) * h; ++k)
    for (int c = 0; c < 3; ++c) v[c * std::size_t(w) * h + k] = frame.pixels()[3 * k + c] / 255.0;

  struct Stencil {
    int self;
    int nb[4];
    int count;
  };
  std::vector<Stencil> stencils;
  stencils.reserve(unknown.size());
  for (int k : unknown) {
    const int x = k % w, y = k / w;
    Stencil s{k, {0, 0, 0, 0}, 0};
    if (x > 0) s.nb[s.count++] = k - 1;
    if (x + 1 < w) s.nb[s.count++] = k + 1;
    if (y > 0) s.nb[s.count++] = k - w;
    if (y + 1 < h) s.nb[s.count++] = k + w;
    stencils.push_back(s);
  }

  const std::size_t plane = std::size_t(w) * h;
  // Start the unknowns at the mean of the known pixels bordering them.
  std::vector<std::uint8_t> border(plane, 0);
  for (const Stencil& s : stencils)
    for (int q = 0; q < s.count; ++q)
      if (!mask[s.nb[q]]) border[s.nb[q]] = 1;
  for (int c = 0; c < 3; ++c) {
    double* p = v.data() + c * plane;
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < plane; ++k)
      if (border[k]) sum += p[k], ++count;
    if (count)
      for (const Stencil& s : stencils) p[s.self] = sum / count;
  }

  int iters = 0;
  while (iters < opt.max_iters) {
    ++iters;
    double max_change = 0.0;
    for (const Stencil& s : stencils) {
      for (int c = 0; c < 3; ++c) {
        double* p = v.data() + c * plane;
        double sum = 0.0;
        for (int q = 0; q < s.count; ++q) sum += p[s.nb[q]];
        const double next = sum / s.count;
        max_change = std::max(max_change, std::abs(next - p[s.self]));
        p[s.self] = next;
      }
    }
    if (max_change < opt.tol) break;
  }

  for (int k : unknown)
    for (int c = 0; c < 3; ++c)
      frame.pixels()[3 * std::size_t(k) + c] =
          std::uint8_t(std::clamp(std::lround(v[c * plane + k] * 255.0), 0L, 255L));
  return iters;
}

}  // namespace detail

FrameSequence inpaint_diffusion(const InpaintRequest& req, const DiffusionOptions& opt) {
  req.validate();
  FrameSequence out = req.frames;
  const int w = out.width(), h = out.height();
#pragma omp parallel for schedule(dynamic)
  for (int n = 0; n < out.size(); ++n)
    detail::diffuse_frame(out.frames[n], pixel_mask(req.masks, n, req.block_size, w, h), opt,
                          detail::SweepOrder::red_black);
  return out;
}

FrameSequence inpaint_temporal_copy(const InpaintRequest& req, const DiffusionOptions& fallback) {
  req.validate();
  const int frames = req.frames.size();
  const int b = req.block_size;
  const int w = req.frames.width(), h = req.frames.height();
  FrameSequence out = req.frames;

#pragma omp parallel for schedule(dynamic)
  for (int n = 0; n < frames; ++n) {
    Frame& dst = out.frames[n];
    std::vector<std::uint8_t> unresolved(std::size_t(w) * h, 0);
    bool any_unresolved = false;
    for (int i = 0; i < req.masks.rows(); ++i) {
      for (int j = 0; j < req.masks.cols(); ++j) {
        if (!req.masks(i, j, n)) continue;
        int source = -1;
        for (int d = 1; d < frames && source < 0; ++d) {
          if (n - d >= 0 && !req.masks(i, j, n - d)) source = n - d;
          else if (n + d < frames && !req.masks(i, j, n + d)) source = n + d;
        }
        if (source < 0) {
          any_unresolved = true;
          for (int y = i * b; y < (i + 1) * b; ++y)
            std::memset(unresolved.data() + std::size_t(y) * w + j * b, 255, b);
          continue;
        }
        const Frame& src = req.frames.frames[source];
        for (int y = i * b; y < (i + 1) * b; ++y)
          std::memcpy(dst.row(y) + 3 * j * b, src.row(y) + 3 * j * b, std::size_t(3) * b);
      }
    }
    if (any_unresolved) detail::diffuse_frame(dst, unresolved, fallback, detail::SweepOrder::red_black);
  }
  return out;
}

FrameSequence inpaint_external(const InpaintRequest& req, const ExternalInpainter& tool) {
  req.validate();
  const fs::path frames_dir = tool.workdir / "frames";
  const fs::path masks_dir = tool.workdir / "masks";
  const fs::path out_dir = tool.workdir / "results";
  for (const auto& d : {frames_dir, masks_dir, out_dir}) {
    fs::remove_all(d);
    fs::create_directories(d);
  }
  write_sequence(req.frames, frames_dir, SequenceKind::png_directory);
  const int w = req.frames.width(), h = req.frames.height();
  for (int n = 0; n < req.frames.size(); ++n)
    write_gray_png(w, h, pixel_mask(req.masks, n, req.block_size, w, h), masks_dir / frame_file_name(n));

  const std::string cmd = expand_template(
      tool.command, {{"frames", frames_dir.string()}, {"masks", masks_dir.string()}, {"out", out_dir.string()}});
  run_checked(cmd, "in-painting tool");

  std::vector<fs::path> results;
  for (const auto& e : fs::directory_iterator(out_dir))
    if (e.path().extension() == ".png") results.push_back(e.path());
  if (int(results.size()) != req.frames.size())
    throw Error("output count mismatch: expected " + std::to_string(req.frames.size()) + ", got " +
                std::to_string(results.size()));
  FrameSequence out = req.frames;
  for (int n = 0; n < out.size(); ++n) {
    const fs::path file = out_dir / frame_file_name(n);
    if (!fs::exists(file)) throw Error("missing in-painted frame " + file.string());
    Frame f = read_png(file);
    if (f.width() != w || f.height() != h) throw Error("output geometry mismatch at " + file.string());
    out.frames[n] = std::move(f);
  }
  return out;
}

}  // namespace elvis
