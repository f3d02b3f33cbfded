// elvis-mjpeg: a small lossy intra-only codec used as a hermetic stand-in for
// an external encoder.
//
//   elvis-mjpeg encode Q in.y4m out.mjpg    (Q in 0..99, larger = lower quality)
//   elvis-mjpeg decode in.mjpg out.y4m
//
// Container: "EMJP", then u32 width, height, frames, rate num, rate den
// (little-endian), then per frame a u32 length and a baseline JPEG.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <jpeglib.h>

#include "elvis/media_io.hpp"

using namespace elvis;

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {char(v & 0xff), char((v >> 8) & 0xff), char((v >> 16) & 0xff), char(v >> 24)};
  out.write(b, 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw std::runtime_error("truncated stream");
  return b[0] | (b[1] << 8) | (b[2] << 16) | (std::uint32_t(b[3]) << 24);
}

std::vector<unsigned char> compress(const Frame& f, int quality) {
  jpeg_compress_struct c{};
  jpeg_error_mgr err{};
  c.err = jpeg_std_error(&err);
  jpeg_create_compress(&c);
  unsigned char* buf = nullptr;
  unsigned long size = 0;
  jpeg_mem_dest(&c, &buf, &size);
  c.image_width = f.width();
  c.image_height = f.height();
  c.input_components = 3;
  c.in_color_space = JCS_RGB;
  jpeg_set_defaults(&c);
  jpeg_set_quality(&c, quality, TRUE);
  jpeg_start_compress(&c, TRUE);
  while (c.next_scanline < c.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(f.row(int(c.next_scanline)));
    jpeg_write_scanlines(&c, &row, 1);
  }
  jpeg_finish_compress(&c);
  jpeg_destroy_compress(&c);
  std::vector<unsigned char> out(buf, buf + size);
  std::free(buf);
  return out;
}

Frame decompress(const std::vector<unsigned char>& data, int w, int h) {
  jpeg_decompress_struct d{};
  jpeg_error_mgr err{};
  d.err = jpeg_std_error(&err);
  jpeg_create_decompress(&d);
  jpeg_mem_src(&d, data.data(), data.size());
  jpeg_read_header(&d, TRUE);
  d.out_color_space = JCS_RGB;
  jpeg_start_decompress(&d);
  if (int(d.output_width) != w || int(d.output_height) != h) throw std::runtime_error("frame size mismatch");
  Frame f(w, h);
  while (d.output_scanline < d.output_height) {
    JSAMPROW row = f.row(int(d.output_scanline));
    jpeg_read_scanlines(&d, &row, 1);
  }
  jpeg_finish_decompress(&d);
  jpeg_destroy_decompress(&d);
  return f;
}

int encode(int q, const std::string& in, const std::string& out) {
  const FrameSequence seq = load_sequence(in);
  const int quality = std::max(1, std::min(100, 100 - q));
  std::ofstream os(out, std::ios::binary);
  os.write("EMJP", 4);
  for (int v : {seq.width(), seq.height(), seq.size(), seq.frame_rate.num, seq.frame_rate.den}) put_u32(os, v);
  for (const Frame& f : seq.frames) {
    const auto jpg = compress(f, quality);
    put_u32(os, std::uint32_t(jpg.size()));
    os.write(reinterpret_cast<const char*>(jpg.data()), std::streamsize(jpg.size()));
  }
  return os ? 0 : 1;
}

int decode(const std::string& in, const std::string& out) {
  std::ifstream is(in, std::ios::binary);
  char magic[4];
  if (!is.read(magic, 4) || std::string(magic, 4) != "EMJP") throw std::runtime_error("not an EMJP stream");
  const int w = int(get_u32(is)), h = int(get_u32(is)), n = int(get_u32(is));
  FrameSequence seq;
  seq.frame_rate.num = int(get_u32(is));
  seq.frame_rate.den = int(get_u32(is));
  for (int k = 0; k < n; ++k) {
    std::vector<unsigned char> jpg(get_u32(is));
    if (!is.read(reinterpret_cast<char*>(jpg.data()), std::streamsize(jpg.size())))
      throw std::runtime_error("truncated stream");
    seq.frames.push_back(decompress(jpg, w, h));
  }
  seq.original_width = w;
  seq.original_height = h;
  write_sequence(seq, out, SequenceKind::y4m_file, Y4mColor::rgb444);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    const std::string mode = argc > 1 ? argv[1] : "";
    if (mode == "encode" && argc == 5) return encode(std::stoi(argv[2]), argv[3], argv[4]);
    if (mode == "decode" && argc == 4) return decode(argv[2], argv[3]);
  } catch (const std::exception& e) {
    std::cerr << "elvis-mjpeg: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "usage: elvis-mjpeg encode Q in.y4m out | elvis-mjpeg decode in out.y4m\n";
  return 2;
}
