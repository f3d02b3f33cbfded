#include "elvis/sidecar.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iterator>

#include "elvis/error.hpp"

namespace elvis {

namespace {

void put_be(std::vector<std::uint8_t>& out, std::uint32_t v, int bytes) {
  for (int s = bytes - 1; s >= 0; --s) out.push_back(std::uint8_t(v >> (8 * s)));
}

std::uint32_t get_be(const std::uint8_t* p, int bytes) {
  std::uint32_t v = 0;
  for (int k = 0; k < bytes; ++k) v = (v << 8) | p[k];
  return v;
}

void check_u16(int v, const char* what) {
  if (v < 0 || v > 0xFFFF) throw Error(std::string(what) + " does not fit the sidecar header");
}

std::vector<std::uint8_t> deflate_raw(const std::vector<std::uint8_t>& in) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, -15, 9, Z_DEFAULT_STRATEGY) != Z_OK)
    throw Error("deflateInit failed");
  std::vector<std::uint8_t> out(deflateBound(&zs, uLong(in.size())));
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = uInt(in.size());
  zs.next_out = out.data();
  zs.avail_out = uInt(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw Error("deflate failed");
  out.resize(zs.total_out);
  return out;
}

// Inflates exactly `expected` bytes; the stream must end where the input ends.
std::vector<std::uint8_t> inflate_raw(std::span<const std::uint8_t> in, std::size_t expected) {
  z_stream zs{};
  if (inflateInit2(&zs, -15) != Z_OK) throw Error("inflateInit failed");
  std::vector<std::uint8_t> out(expected + 1);
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = uInt(in.size());
  zs.next_out = out.data();
  zs.avail_out = uInt(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  const std::size_t produced = zs.total_out, consumed = zs.total_in;
  inflateEnd(&zs);
  if (rc == Z_DATA_ERROR) throw Error("corrupt sidecar payload");
  if (rc != Z_STREAM_END) throw Error("truncated sidecar payload");
  if (produced != expected) throw Error(produced < expected ? "truncated sidecar payload" : "sidecar payload too long");
  if (consumed != in.size()) throw Error("trailing bytes after sidecar payload");
  out.resize(expected);
  return out;
}

}  // namespace

std::vector<std::uint8_t> encode_sidecar(const RemovalPlan& plan, const SidecarGeometry& g) {
  check_u16(g.original_width, "width");
  check_u16(g.original_height, "height");
  check_u16(g.block_size, "block size");
  check_u16(plan.k(), "k");
  if (g.block_size <= 0 || g.original_width <= 0 || g.original_height <= 0)
    throw Error("sidecar geometry must be positive");
  if (plan.rows() != g.rows() || plan.cols() != g.cols() || plan.frames() != g.frame_count)
    throw Error("plan/geometry mismatch");

  const int row_bytes = (plan.cols() + 7) / 8;
  std::vector<std::uint8_t> bits(std::size_t(plan.frames()) * plan.rows() * row_bytes, 0);
  for (int n = 0; n < plan.frames(); ++n) {
    for (int i = 0; i < plan.rows(); ++i) {
      std::uint8_t* row = bits.data() + (std::size_t(n) * plan.rows() + i) * row_bytes;
      for (int j : plan.removed(n, i)) row[j / 8] |= std::uint8_t(0x80u >> (j % 8));
    }
  }

  std::vector<std::uint8_t> out{'E', 'L', 'V', 'S', kSidecarVersion};
  put_be(out, std::uint32_t(g.original_width), 2);
  put_be(out, std::uint32_t(g.original_height), 2);
  put_be(out, std::uint32_t(g.block_size), 2);
  put_be(out, std::uint32_t(g.frame_count), 4);
  put_be(out, std::uint32_t(plan.k()), 2);
  const auto payload = deflate_raw(bits);
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

DecodedSidecar decode_sidecar(std::span<const std::uint8_t> bytes) {
  // a short prefix of the magic is a truncation, anything else is not a sidecar
  if (std::memcmp(bytes.data(), "ELVS", std::min<std::size_t>(bytes.size(), 4)) != 0) throw Error("bad magic");
  if (bytes.size() < kSidecarHeaderSize) throw Error("truncated sidecar header");
  const std::uint8_t* p = bytes.data();
  if (p[4] != kSidecarVersion) throw Error("unsupported sidecar version " + std::to_string(p[4]));
  SidecarGeometry g;
  g.original_width = int(get_be(p + 5, 2));
  g.original_height = int(get_be(p + 7, 2));
  g.block_size = int(get_be(p + 9, 2));
  g.frame_count = int(get_be(p + 11, 4));
  const int k = int(get_be(p + 15, 2));
  if (g.block_size == 0 || g.original_width == 0 || g.original_height == 0)
    throw Error("invalid sidecar geometry");
  const int rows = g.rows(), cols = g.cols();
  if (k > cols) throw Error("k_per_row exceeds the number of block columns");

  const int row_bytes = (cols + 7) / 8;
  const std::size_t expected = std::size_t(g.frame_count) * rows * row_bytes;
  const auto bits = inflate_raw(bytes.subspan(kSidecarHeaderSize), expected);

  RemovalPlan plan(rows, cols, g.frame_count, k);
  for (int n = 0; n < g.frame_count; ++n) {
    for (int i = 0; i < rows; ++i) {
      const std::uint8_t* row = bits.data() + (std::size_t(n) * rows + i) * row_bytes;
      std::vector<int> removed;
      for (int j = 0; j < row_bytes * 8; ++j) {
        if (!(row[j / 8] & (0x80u >> (j % 8)))) continue;
        if (j >= cols) throw Error("padding bits set in sidecar row");
        removed.push_back(j);
      }
      if (int(removed.size()) != k) throw Error("row popcount does not match k_per_row");
      plan.set_removed(n, i, std::move(removed));
    }
  }
  return {std::move(plan), g};
}

double sidecar_overhead(std::uintmax_t sidecar_bytes, std::uintmax_t encoded_video_bytes) {
  if (encoded_video_bytes == 0) throw Error("encoded video size is zero");
  return double(sidecar_bytes) / double(encoded_video_bytes);
}

void write_sidecar_file(const std::vector<std::uint8_t>& bytes, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!out) throw Error("cannot write " + file.string());
}

std::vector<std::uint8_t> read_sidecar_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot open " + file.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace elvis
