// Times the serial reference kernels against the OpenMP ones on the same
// synthetic input and reports whether their outputs agree.

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "elvis/analysis.hpp"
#include "elvis/inpaint.hpp"
#include "elvis/media_io.hpp"
#include "elvis/metrics.hpp"
#include "elvis/resample.hpp"
#include "elvis/selection.hpp"

using namespace elvis;

namespace {

// Smooth gradient plus noise, shifted a little per frame.
FrameSequence synthetic_clip(int w, int h, int frames, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> noise(0.0, 6.0);
  FrameSequence seq;
  for (int n = 0; n < frames; ++n) {
    Frame f(w, h);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        for (int c = 0; c < 3; ++c) {
          const double v = 80 + 60 * std::sin((x + 2 * n) * 0.05 + c) + 40 * std::cos(y * 0.07) + noise(rng);
          f.at(x, y, c) = std::uint8_t(std::clamp(v, 0.0, 255.0));
        }
    seq.frames.push_back(std::move(f));
  }
  seq.original_width = w;
  seq.original_height = h;
  return seq;
}

double best_of(int reps, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

double max_diff(const RealTensor& a, const RealTensor& b) {
  double d = 0;
  for (std::size_t k = 0; k < a.values().size(); ++k) d = std::max(d, std::abs(a.values()[k] - b.values()[k]));
  return d;
}

double max_diff(const FrameSequence& a, const FrameSequence& b) {
  int d = 0;
  for (int n = 0; n < a.size(); ++n)
    for (std::size_t k = 0; k < a.frames[n].pixels().size(); ++k)
      d = std::max(d, std::abs(a.frames[n].pixels()[k] - b.frames[n].pixels()[k]));
  return d;
}

void row(const char* kernel, double serial, double parallel, double diff) {
  std::printf("%-22s %12.2f %12.2f %8.2fx %12.3g\n", kernel, serial * 1e3, parallel * 1e3, serial / parallel, diff);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reference vs OpenMP kernel timings"};
  int width = 640, height = 368, frames = 24, block = 16, reps = 3, threads = omp_get_max_threads();
  app.add_option("--width", width)->check(CLI::PositiveNumber);
  app.add_option("--height", height)->check(CLI::PositiveNumber);
  app.add_option("--frames", frames)->check(CLI::PositiveNumber);
  app.add_option("-b,--block", block)->check(CLI::IsMember({8, 16, 32, 64}));
  app.add_option("--reps", reps)->check(CLI::PositiveNumber);
  app.add_option("-j,--threads", threads)->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);
  omp_set_num_threads(threads);

  const FrameSequence seq = align_to_blocks(synthetic_clip(width, height, frames, 1), block);
  const FrameSequence other = synthetic_clip(seq.width(), seq.height(), frames, 2);
  std::printf("%dx%d, %d frames, block %d, %d threads, best of %d\n", seq.width(), seq.height(), frames, block,
              threads, reps);
  std::printf("%-22s %12s %12s %9s %12s\n", "kernel", "serial ms", "openmp ms", "speedup", "max diff");

  RealTensor s_ref, s_par, t_ref, t_par;
  const double s1 = best_of(reps, [&] { s_ref = reference::spatial_complexity(seq, block); });
  const double s2 = best_of(reps, [&] { s_par = spatial_complexity(seq, block); });
  row("spatial complexity", s1, s2, max_diff(s_ref, s_par));
  const double t1 = best_of(reps, [&] { t_ref = reference::temporal_complexity(seq, block); });
  const double t2 = best_of(reps, [&] { t_par = temporal_complexity(seq, block); });
  row("temporal complexity", t1, t2, max_diff(t_ref, t_par));

  const RemovalPlan plan =
      select_blocks(s_par, t_par, MaskTensor(s_par.rows(), s_par.cols(), s_par.frames()), {0.5, 0.5, 0.25});
  FrameSequence shr_ref, shr_par, st_ref, st_par;
  const double h1 = best_of(reps, [&] { shr_ref = reference::shrink_sequence(seq, plan, block); });
  const double h2 = best_of(reps, [&] { shr_par = shrink_sequence(seq, plan, block); });
  row("shrink", h1, h2, max_diff(shr_ref, shr_par));
  const double r1 = best_of(reps, [&] { st_ref = reference::stretch_sequence(shr_par, plan, block); });
  const double r2 = best_of(reps, [&] { st_par = stretch_sequence(shr_par, plan, block); });
  row("stretch", r1, r2, max_diff(st_ref, st_par));

  // Diffusion orders differ (raster vs red-black), so outputs agree only to
  // within the stopping tolerance.
  const InpaintRequest req{st_par, plan.to_mask(), block};
  FrameSequence d_ref, d_par;
  const double d1 = best_of(reps, [&] { d_ref = reference::inpaint_diffusion(req); });
  const double d2 = best_of(reps, [&] { d_par = inpaint_diffusion(req); });
  row("diffusion in-paint", d1, d2, max_diff(d_ref, d_par));

  double m_ref = 0, m_par = 0, q_ref = 0, q_par = 0;
  const double m1 = best_of(reps, [&] { m_ref = reference::mse(seq, other); });
  const double m2 = best_of(reps, [&] { m_par = mse(seq, other); });
  row("mse", m1, m2, std::abs(m_ref - m_par));
  const double q1 = best_of(reps, [&] { q_ref = reference::ssim(seq, other); });
  const double q2 = best_of(reps, [&] { q_par = ssim(seq, other); });
  row("ssim", q1, q2, std::abs(q_ref - q_par));
  return 0;
}
