#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "elvis/analysis.hpp"
#include "elvis/error.hpp"

namespace elvis::reference {

RealTensor spatial_complexity(const FrameSequence& seq, int b) {
  const int w = seq.width(), h = seq.height();
  if (seq.empty() || w % b || h % b) throw Error("sequence is not aligned to the block size");
  RealTensor s(h / b, w / b, seq.size());
  for (int n = 0; n < seq.size(); ++n) {
    const auto l = seq.frames[n].luma();
    auto px = [&](int x, int y) {
      return int(l[std::size_t(std::clamp(y, 0, h - 1)) * w + std::clamp(x, 0, w - 1)]);
    };
    for (int i = 0; i < h / b; ++i) {
      for (int j = 0; j < w / b; ++j) {
        double sum = 0.0;
        for (int y = i * b; y < (i + 1) * b; ++y) {
          for (int x = j * b; x < (j + 1) * b; ++x) {
            const int gx = px(x + 1, y - 1) + 2 * px(x + 1, y) + px(x + 1, y + 1) - px(x - 1, y - 1) -
                           2 * px(x - 1, y) - px(x - 1, y + 1);
            const int gy = px(x - 1, y + 1) + 2 * px(x, y + 1) + px(x + 1, y + 1) - px(x - 1, y - 1) -
                           2 * px(x, y - 1) - px(x + 1, y - 1);
            sum += std::sqrt(double(gx * gx + gy * gy)) * (1.0 / (255.0 * 1.4142135623730951 * 4.0));
          }
        }
        s(i, j, n) = std::min(sum * (1.0 / (double(b) * b)), 1.0);
      }
    }
  }
  return s;
}

RealTensor temporal_complexity(const FrameSequence& seq, int b) {
  const int w = seq.width(), h = seq.height();
  if (seq.empty() || w % b || h % b) throw Error("sequence is not aligned to the block size");
  RealTensor t(h / b, w / b, seq.size());
  for (int n = 0; n + 1 < seq.size(); ++n) {
    const auto a = seq.frames[n].luma(), c = seq.frames[n + 1].luma();
    for (int i = 0; i < h / b; ++i) {
      for (int j = 0; j < w / b; ++j) {
        std::uint64_t sum = 0;
        for (int y = i * b; y < (i + 1) * b; ++y)
          for (int x = j * b; x < (j + 1) * b; ++x)
            sum += std::uint64_t(std::abs(int(a[std::size_t(y) * w + x]) - int(c[std::size_t(y) * w + x])));
        t(i, j, n) = double(sum) / (255.0 * b * b);
      }
    }
  }
  return t;
}

}  // namespace elvis::reference
