#include <cmath>

#include "elvis/error.hpp"
#include "elvis/metrics.hpp"

namespace elvis::reference {

double mse(const FrameSequence& a, const FrameSequence& b) {
  if (a.size() != b.size() || a.width() != b.width() || a.height() != b.height() || a.empty())
    throw Error("geometry mismatch between compared sequences");
  double sum = 0.0;
  for (int n = 0; n < a.size(); ++n)
    for (int y = 0; y < a.height(); ++y)
      for (int x = 0; x < a.width(); ++x)
        for (int c = 0; c < 3; ++c) {
          const double d = double(a.frames[n].at(x, y, c)) - b.frames[n].at(x, y, c);
          sum += d * d;
        }
  return sum / (3.0 * a.width() * a.height() * a.size());
}

// Direct 2-D windowed evaluation, one window at a time.
double ssim(const FrameSequence& a, const FrameSequence& b) {
  if (a.size() != b.size() || a.width() != b.width() || a.height() != b.height() || a.empty())
    throw Error("geometry mismatch between compared sequences");
  constexpr int r = 5;
  double weights[11][11];
  double wsum = 0.0;
  for (int v = -r; v <= r; ++v)
    for (int u = -r; u <= r; ++u) wsum += weights[v + r][u + r] = std::exp(-(u * u + v * v) / 4.5);
  const double c1 = 6.5025, c2 = 58.5225;
  const int w = a.width(), h = a.height();
  if (w < 11 || h < 11) throw Error("frames are smaller than the 11x11 SSIM window");
  double total = 0.0;
  for (int n = 0; n < a.size(); ++n) {
    const auto la = a.frames[n].luma(), lb = b.frames[n].luma();
    double frame_sum = 0.0;
    for (int cy = r; cy < h - r; ++cy) {
      for (int cx = r; cx < w - r; ++cx) {
        double mx = 0, my = 0;
        for (int v = -r; v <= r; ++v)
          for (int u = -r; u <= r; ++u) {
            const double wt = weights[v + r][u + r] / wsum;
            mx += wt * la[std::size_t(cy + v) * w + cx + u];
            my += wt * lb[std::size_t(cy + v) * w + cx + u];
          }
        double vx = 0, vy = 0, cxy = 0;
        for (int v = -r; v <= r; ++v)
          for (int u = -r; u <= r; ++u) {
            const double wt = weights[v + r][u + r] / wsum;
            const double dx = la[std::size_t(cy + v) * w + cx + u] - mx;
            const double dy = lb[std::size_t(cy + v) * w + cx + u] - my;
            vx += wt * dx * dx;
            vy += wt * dy * dy;
            cxy += wt * dx * dy;
          }
        frame_sum += ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
      }
    }
    total += frame_sum / (double(w - 10) * (h - 10));
  }
  return total / a.size();
}

}  // namespace elvis::reference
