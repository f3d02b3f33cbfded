#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "elvis/selection.hpp"

namespace elvis {

// Wire layout (big-endian):
//   "ELVS" | version u8 | original_width u16 | original_height u16 |
//   block_size u16 | frame_count u32 | k_per_row u16 | raw DEFLATE payload
// The payload inflates to frame_count * rows * ceil(cols/8) bytes: one bit per
// block, MSB first, each block-row padded to a whole byte; 1 = removed.
inline constexpr std::size_t kSidecarHeaderSize = 17;
inline constexpr std::uint8_t kSidecarVersion = 1;

struct SidecarGeometry {
  int original_width = 0;
  int original_height = 0;
  int block_size = 0;
  int frame_count = 0;

  int rows() const { return (original_height + block_size - 1) / block_size; }
  int cols() const { return (original_width + block_size - 1) / block_size; }
  bool operator==(const SidecarGeometry&) const = default;
};

struct DecodedSidecar {
  RemovalPlan plan;
  SidecarGeometry geometry;
};

std::vector<std::uint8_t> encode_sidecar(const RemovalPlan& plan, const SidecarGeometry& geometry);
DecodedSidecar decode_sidecar(std::span<const std::uint8_t> bytes);

// sidecar size / encoded video size.
double sidecar_overhead(std::uintmax_t sidecar_bytes, std::uintmax_t encoded_video_bytes);

void write_sidecar_file(const std::vector<std::uint8_t>& bytes, const std::filesystem::path& file);
std::vector<std::uint8_t> read_sidecar_file(const std::filesystem::path& file);

}  // namespace elvis
