#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "elvis/frame.hpp"
#include "elvis/selection.hpp"

namespace elvis::test {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "elvis");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

Frame solid_frame(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b);
Frame gray_frame(int w, int h, std::uint8_t v);
Frame random_frame(int w, int h, std::mt19937& rng);
FrameSequence sequence_of(std::vector<Frame> frames);
FrameSequence random_sequence(int w, int h, int n, std::mt19937& rng);

// Smooth gradients, drifting soft-edged shapes, a textured background band and
// light sensor noise; compresses like camera footage rather than white noise.
FrameSequence natural_clip(int w, int h, int n, std::uint32_t seed = 7);

// Random valid plan: k = floor(r*cols) per row, r drawn from the given choices.
RemovalPlan random_plan(int rows, int cols, int frames, int k, std::mt19937& rng);

void write_text(const std::filesystem::path& file, const std::string& text);
// Writes an executable /bin/sh script.
void write_script(const std::filesystem::path& file, const std::string& body);

// Paths of helper executables, baked in by CMake.
std::string mjpeg_tool();

}  // namespace elvis::test
