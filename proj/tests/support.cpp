#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace elvis::test {

TempDir::TempDir(const std::string& tag) {
  std::string tmpl = (fs::temp_directory_path() / (tag + "-XXXXXX")).string();
  if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

Frame solid_frame(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  Frame f(w, h);
  auto px = f.pixels();
  for (std::size_t k = 0; k < px.size(); k += 3) px[k] = r, px[k + 1] = g, px[k + 2] = b;
  return f;
}

Frame gray_frame(int w, int h, std::uint8_t v) { return solid_frame(w, h, v, v, v); }

Frame random_frame(int w, int h, std::mt19937& rng) {
  Frame f(w, h);
  std::uniform_int_distribution<int> d(0, 255);
  for (auto& p : f.pixels()) p = std::uint8_t(d(rng));
  return f;
}

FrameSequence sequence_of(std::vector<Frame> frames) {
  FrameSequence s;
  s.frames = std::move(frames);
  s.original_width = s.width();
  s.original_height = s.height();
  return s;
}

FrameSequence random_sequence(int w, int h, int n, std::mt19937& rng) {
  std::vector<Frame> frames;
  for (int k = 0; k < n; ++k) frames.push_back(random_frame(w, h, rng));
  return sequence_of(std::move(frames));
}

FrameSequence natural_clip(int w, int h, int n, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> noise(0.0, 2.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  struct Blob {
    double x, y, vx, vy, radius, r, g, b;
  };
  std::vector<Blob> blobs;
  for (int k = 0; k < 5; ++k)
    blobs.push_back({u(rng) * w, u(rng) * h, (u(rng) - 0.5) * 8, (u(rng) - 0.5) * 4, 30 + u(rng) * 60,
                     40 + u(rng) * 200, 40 + u(rng) * 200, 40 + u(rng) * 200});

  std::vector<Frame> frames;
  for (int t = 0; t < n; ++t) {
    Frame f(w, h);
    const double pan = 1.5 * t;
    for (int y = 0; y < h; ++y) {
      std::uint8_t* row = f.row(y);
      for (int x = 0; x < w; ++x) {
        const double sx = x + pan;
        // sky-to-ground gradient with a textured band near the bottom
        double r = 90 + 80.0 * y / h, g = 120 + 60.0 * y / h, b = 200 - 110.0 * y / h;
        if (y > h * 2 / 3) {
          const double tex = 18 * std::sin(sx * 0.35) * std::cos(y * 0.27) + 10 * std::sin(sx * 0.071 + y * 0.13);
          r = 70 + tex, g = 110 + tex, b = 50 + tex * 0.5;
        }
        for (const Blob& o : blobs) {
          const double dx = x - (o.x + o.vx * t), dy = y - (o.y + o.vy * t);
          const double d = std::sqrt(dx * dx + dy * dy);
          const double a = std::clamp((o.radius - d) / 6.0, 0.0, 1.0);
          r = r * (1 - a) + o.r * a, g = g * (1 - a) + o.g * a, b = b * (1 - a) + o.b * a;
        }
        const double e = noise(rng);
        row[3 * x] = std::uint8_t(std::clamp(std::lround(r + e), 0L, 255L));
        row[3 * x + 1] = std::uint8_t(std::clamp(std::lround(g + e), 0L, 255L));
        row[3 * x + 2] = std::uint8_t(std::clamp(std::lround(b + e), 0L, 255L));
      }
    }
    frames.push_back(std::move(f));
  }
  return sequence_of(std::move(frames));
}

RemovalPlan random_plan(int rows, int cols, int frames, int k, std::mt19937& rng) {
  RemovalPlan plan(rows, cols, frames, k);
  std::vector<int> idx(cols);
  for (int n = 0; n < frames; ++n)
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) idx[j] = j;
      std::shuffle(idx.begin(), idx.end(), rng);
      plan.set_removed(n, i, std::vector<int>(idx.begin(), idx.begin() + k));
    }
  return plan;
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file);
  out << text;
}

void write_script(const fs::path& file, const std::string& body) {
  write_text(file, "#!/bin/sh\n" + body + "\n");
  fs::permissions(file, fs::perms::owner_all | fs::perms::group_read | fs::perms::others_read);
}

std::string mjpeg_tool() { return ELVIS_MJPEG_TOOL; }

}  // namespace elvis::test
