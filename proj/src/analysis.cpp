#include "elvis/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include "elvis/error.hpp"
#include "elvis/media_io.hpp"

namespace elvis {

namespace {

constexpr double kSobelScale = 1.0 / (255.0 * 1.4142135623730951 * 4.0);

void check_aligned(const FrameSequence& seq, int block_size) {
  if (seq.empty()) throw Error("no frames");
  if (block_size <= 0 || seq.width() % block_size || seq.height() % block_size)
    throw Error("sequence is not aligned to the block size");
}

std::vector<std::vector<std::uint8_t>> all_luma(const FrameSequence& seq) {
  std::vector<std::vector<std::uint8_t>> luma(seq.frames.size());
#pragma omp parallel for schedule(static)
  for (int n = 0; n < seq.size(); ++n) luma[n] = seq.frames[n].luma();
  return luma;
}

}  // namespace

RealTensor spatial_complexity(const FrameSequence& seq, int block_size) {
  check_aligned(seq, block_size);
  const int w = seq.width(), h = seq.height();
  const int rows = h / block_size, cols = w / block_size;
  RealTensor s(rows, cols, seq.size());
  const auto luma = all_luma(seq);
  const double inv_area = 1.0 / (double(block_size) * block_size);

  // One task per (frame, block-row). Each block accumulates in raster order,
  // so the result does not depend on the thread count.
#pragma omp parallel for collapse(2) schedule(static)
  for (int n = 0; n < seq.size(); ++n) {
    for (int i = 0; i < rows; ++i) {
      const std::uint8_t* l = luma[n].data();
      std::vector<double> acc(cols, 0.0);
      for (int y = i * block_size; y < (i + 1) * block_size; ++y) {
        const std::uint8_t* up = l + std::size_t(std::max(y - 1, 0)) * w;
        const std::uint8_t* mid = l + std::size_t(y) * w;
        const std::uint8_t* dn = l + std::size_t(std::min(y + 1, h - 1)) * w;
        for (int x = 0; x < w; ++x) {
          const int xl = std::max(x - 1, 0), xr = std::min(x + 1, w - 1);
          const int gx = (up[xr] + 2 * mid[xr] + dn[xr]) - (up[xl] + 2 * mid[xl] + dn[xl]);
          const int gy = (dn[xl] + 2 * dn[x] + dn[xr]) - (up[xl] + 2 * up[x] + up[xr]);
          acc[x / block_size] += std::sqrt(double(gx * gx + gy * gy)) * kSobelScale;
        }
      }
      for (int j = 0; j < cols; ++j) s(i, j, n) = std::min(acc[j] * inv_area, 1.0);
    }
  }
  return s;
}

RealTensor temporal_complexity(const FrameSequence& seq, int block_size) {
  check_aligned(seq, block_size);
  const int w = seq.width(), h = seq.height();
  const int rows = h / block_size, cols = w / block_size;
  RealTensor t(rows, cols, seq.size());
  const auto luma = all_luma(seq);
  const double inv = 1.0 / (255.0 * block_size * block_size);

#pragma omp parallel for collapse(2) schedule(static)
  for (int n = 0; n < seq.size() - 1; ++n) {
    for (int i = 0; i < rows; ++i) {
      std::vector<std::uint64_t> acc(cols, 0);
      for (int y = i * block_size; y < (i + 1) * block_size; ++y) {
        const std::uint8_t* a = luma[n].data() + std::size_t(y) * w;
        const std::uint8_t* b = luma[n + 1].data() + std::size_t(y) * w;
        for (int x = 0; x < w; ++x) acc[x / block_size] += std::uint64_t(std::abs(int(a[x]) - int(b[x])));
      }
      for (int j = 0; j < cols; ++j) t(i, j, n) = double(acc[j]) * inv;
    }
  }
  return t;
}

ComplexityTensors analyze_complexity(const FrameSequence& seq, int block_size) {
  return {spatial_complexity(seq, block_size), temporal_complexity(seq, block_size), block_size};
}

SaliencyMask block_mask(const FrameSequence& pixel_masks, const BlockGeometry& g, double coverage) {
  if (pixel_masks.size() < g.frame_count) throw Error("missing frame mask");
  const int b = g.block_size;
  SaliencyMask out{MaskTensor(g.rows(), g.cols(), g.frame_count), MaskSource::file};
  const double needed = coverage * b * b;
  for (int n = 0; n < g.frame_count; ++n) {
    const Frame& m = pixel_masks.frames[n];
    const bool aligned = m.width() == g.width && m.height() == g.height;
    const bool original = m.width() == g.original_width && m.height() == g.original_height;
    if (!aligned && !original) throw Error("mask dimension mismatch at frame " + std::to_string(n));
    for (int i = 0; i < g.rows(); ++i) {
      for (int j = 0; j < g.cols(); ++j) {
        int count = 0;
        for (int y = i * b; y < (i + 1) * b; ++y) {
          const int sy = std::min(y, m.height() - 1);
          for (int x = j * b; x < (j + 1) * b; ++x) {
            const int sx = std::min(x, m.width() - 1);
            if (m.at(sx, sy, 0) | m.at(sx, sy, 1) | m.at(sx, sy, 2)) ++count;
          }
        }
        out.m(i, j, n) = count >= needed ? 1 : 0;
      }
    }
  }
  return out;
}

SaliencyMask load_masks(const std::filesystem::path& dir, const BlockGeometry& g, double coverage) {
  FrameSequence masks;
  for (int n = 0; n < g.frame_count; ++n) {
    const auto file = dir / frame_file_name(n);
    if (!std::filesystem::exists(file)) throw Error("missing frame mask: " + file.string());
    masks.frames.push_back(read_png(file));
  }
  return block_mask(masks, g, coverage);
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw Error("quantile of an empty set");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * double(values.size() - 1);
  const std::size_t lo = std::size_t(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - double(lo);
  return values[lo] + (values[hi] - values[lo]) * frac;
}

SaliencyMask motion_saliency(const RealTensor& t, double q) {
  if (!(q > 0.0 && q < 1.0)) throw Error("motion quantile must lie in (0,1)");
  SaliencyMask out{MaskTensor(t.rows(), t.cols(), t.frames()), MaskSource::motion_heuristic};
  const int last = t.frames() - 1;
  for (int n = 0; n < last; ++n) {
    const auto plane = t.frame(n);
    const double cut = quantile({plane.begin(), plane.end()}, q);
    auto m = out.m.frame(n);
    for (std::size_t k = 0; k < plane.size(); ++k) m[k] = plane[k] > cut ? 1 : 0;
  }
  if (last >= 1) std::ranges::copy(out.m.frame(last - 1), out.m.frame(last).begin());
  return out;
}

SaliencyMask motion_saliency(const FrameSequence& seq, int block_size, double q) {
  return motion_saliency(temporal_complexity(seq, block_size), q);
}

SaliencyMask empty_saliency(int rows, int cols, int frames) {
  return {MaskTensor(rows, cols, frames), MaskSource::none};
}

namespace {
template <class T>
void write_csv_impl(const BlockTensor<T>& t, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  out.precision(17);
  for (int n = 0; n < t.frames(); ++n) {
    for (int i = 0; i < t.rows(); ++i) {
      for (int j = 0; j < t.cols(); ++j) {
        if (j) out << ',';
        if constexpr (std::is_same_v<T, std::uint8_t>) out << int(t(i, j, n));
        else out << t(i, j, n);
      }
      out << '\n';
    }
  }
}
}  // namespace

void write_tensor_csv(const RealTensor& t, const std::filesystem::path& f) { write_csv_impl(t, f); }
void write_tensor_csv(const MaskTensor& t, const std::filesystem::path& f) { write_csv_impl(t, f); }

}  // namespace elvis
