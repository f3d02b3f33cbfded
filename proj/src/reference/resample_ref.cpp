#include <algorithm>

#include "elvis/error.hpp"
#include "elvis/resample.hpp"

namespace elvis::reference {

// Pixel-at-a-time, one frame after another.

FrameSequence shrink_sequence(const FrameSequence& seq, const RemovalPlan& plan, int b) {
  if (seq.size() != plan.frames()) throw Error("plan frame count does not match the sequence");
  FrameSequence out = seq;
  out.frames.clear();
  for (int n = 0; n < seq.size(); ++n) {
    const Frame& f = seq.frames[n];
    Frame s((plan.cols() - plan.k()) * b, f.height());
    for (int i = 0; i < plan.rows(); ++i) {
      const auto& gone = plan.removed(n, i);
      int dst_col = 0;
      for (int j = 0; j < plan.cols(); ++j) {
        if (std::find(gone.begin(), gone.end(), j) != gone.end()) continue;
        for (int y = 0; y < b; ++y)
          for (int x = 0; x < b; ++x)
            for (int c = 0; c < 3; ++c) s.at(dst_col * b + x, i * b + y, c) = f.at(j * b + x, i * b + y, c);
        ++dst_col;
      }
    }
    out.frames.push_back(std::move(s));
  }
  return out;
}

FrameSequence stretch_sequence(const FrameSequence& shrunk, const RemovalPlan& plan, int b) {
  if (shrunk.size() != plan.frames()) throw Error("plan frame count does not match the sequence");
  FrameSequence out = shrunk;
  out.frames.clear();
  for (int n = 0; n < shrunk.size(); ++n) {
    const Frame& s = shrunk.frames[n];
    if (s.width() != (plan.cols() - plan.k()) * b) throw Error("shrunk width does not match the plan");
    Frame f(plan.cols() * b, s.height());
    for (int i = 0; i < plan.rows(); ++i) {
      const auto& gone = plan.removed(n, i);
      int src_col = 0;
      for (int j = 0; j < plan.cols(); ++j) {
        if (std::find(gone.begin(), gone.end(), j) != gone.end()) continue;  // stays black
        for (int y = 0; y < b; ++y)
          for (int x = 0; x < b; ++x)
            for (int c = 0; c < 3; ++c) f.at(j * b + x, i * b + y, c) = s.at(src_col * b + x, i * b + y, c);
        ++src_col;
      }
    }
    out.frames.push_back(std::move(f));
  }
  return out;
}

}  // namespace elvis::reference
