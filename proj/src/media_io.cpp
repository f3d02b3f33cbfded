#include "elvis/media_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "elvis/error.hpp"

namespace fs = std::filesystem;

namespace elvis {

namespace {

std::uint8_t clamp_u8(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

// BT.601 studio-swing conversion, the convention of most y4m producers.
void rgb_to_ycbcr(std::uint8_t r, std::uint8_t g, std::uint8_t b, double& y, double& cb, double& cr) {
  y = 16.0 + (65.481 * r + 128.553 * g + 24.966 * b) / 255.0;
  cb = 128.0 + (-37.797 * r - 74.203 * g + 112.0 * b) / 255.0;
  cr = 128.0 + (112.0 * r - 93.786 * g - 18.214 * b) / 255.0;
}

void ycbcr_to_rgb(int y, int cb, int cr, std::uint8_t* rgb) {
  const double yy = 1.164383562 * (y - 16);
  const double u = cb - 128;
  const double v = cr - 128;
  rgb[0] = clamp_u8(yy + 1.596026786 * v);
  rgb[1] = clamp_u8(yy - 0.391762290 * u - 0.812967647 * v);
  rgb[2] = clamp_u8(yy + 2.017232143 * u);
}

struct Y4mHeader {
  int width = 0;
  int height = 0;
  FrameRate rate;
  std::string chroma = "420jpeg";
  bool rgb = false;
};

Y4mHeader parse_y4m_header(const std::string& line) {
  std::istringstream in(line);
  std::string tok;
  in >> tok;
  if (tok != "YUV4MPEG2") throw Error("not a YUV4MPEG2 stream");
  Y4mHeader h;
  while (in >> tok) {
    const char key = tok[0];
    const std::string val = tok.substr(1);
    switch (key) {
      case 'W': h.width = std::stoi(val); break;
      case 'H': h.height = std::stoi(val); break;
      case 'F': {
        const auto colon = val.find(':');
        if (colon == std::string::npos) throw Error("malformed y4m frame rate");
        h.rate.num = std::stoi(val.substr(0, colon));
        h.rate.den = std::stoi(val.substr(colon + 1));
        if (h.rate.num <= 0 || h.rate.den <= 0) h.rate = {};
        break;
      }
      case 'C': h.chroma = val; break;
      case 'X':
        if (val == "COLORSPACE=RGB") h.rgb = true;
        break;
      default: break;  // interlacing, aspect: ignored
    }
  }
  if (h.width <= 0 || h.height <= 0) throw Error("y4m header lacks dimensions");
  const auto depth = h.chroma.find_last_of('p');
  const bool high_depth = depth != std::string::npos && depth + 1 < h.chroma.size() &&
                          std::all_of(h.chroma.begin() + depth + 1, h.chroma.end(), ::isdigit);
  if (high_depth || h.chroma == "mono16")
    throw Error("unsupported bit depth: C" + h.chroma);
  if (h.chroma.rfind("420", 0) != 0 && h.chroma != "444")
    throw Error("unsupported y4m chroma layout: C" + h.chroma);
  return h;
}

FrameSequence load_y4m(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  const Y4mHeader h = parse_y4m_header(line);
  const bool is444 = h.chroma == "444";
  const int cw = is444 ? h.width : (h.width + 1) / 2;
  const int ch = is444 ? h.height : (h.height + 1) / 2;
  const std::size_t luma_size = std::size_t(h.width) * h.height;
  const std::size_t chroma_size = std::size_t(cw) * ch;

  FrameSequence seq;
  seq.frame_rate = h.rate;
  std::vector<std::uint8_t> buf(luma_size + 2 * chroma_size);
  while (std::getline(in, line)) {
    if (line.rfind("FRAME", 0) != 0) throw Error("malformed y4m frame marker");
    in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(buf.size()));
    if (std::size_t(in.gcount()) != buf.size()) throw Error("truncated y4m frame");
    const std::uint8_t* p0 = buf.data();
    const std::uint8_t* p1 = p0 + luma_size;
    const std::uint8_t* p2 = p1 + chroma_size;
    Frame f(h.width, h.height);
    for (int y = 0; y < h.height; ++y) {
      std::uint8_t* out = f.row(y);
      for (int x = 0; x < h.width; ++x, out += 3) {
        const std::size_t li = std::size_t(y) * h.width + x;
        const std::size_t ci = is444 ? li : std::size_t(y / 2) * cw + x / 2;
        if (h.rgb) {
          out[0] = p0[li];
          out[1] = p1[ci];
          out[2] = p2[ci];
        } else {
          ycbcr_to_rgb(p0[li], p1[ci], p2[ci], out);
        }
      }
    }
    seq.frames.push_back(std::move(f));
  }
  seq.original_width = h.width;
  seq.original_height = h.height;
  return seq;
}

std::uintmax_t write_y4m(const FrameSequence& seq, const fs::path& path, Y4mColor color) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  const int w = seq.width(), h = seq.height();
  const bool is420 = color == Y4mColor::ycbcr420;
  out << "YUV4MPEG2 W" << w << " H" << h << " F" << seq.frame_rate.num << ':' << seq.frame_rate.den
      << " Ip A1:1 C" << (is420 ? "420jpeg" : "444");
  if (color == Y4mColor::rgb444) out << " XCOLORSPACE=RGB";
  out << '\n';

  const int cw = is420 ? (w + 1) / 2 : w;
  const int ch = is420 ? (h + 1) / 2 : h;
  std::vector<std::uint8_t> p0(std::size_t(w) * h), p1(std::size_t(cw) * ch), p2(p1.size());
  std::vector<double> acc_b, acc_r, cnt;
  for (const Frame& f : seq.frames) {
    if (color == Y4mColor::rgb444) {
      for (std::size_t k = 0; k < p0.size(); ++k) {
        p0[k] = f.pixels()[3 * k];
        p1[k] = f.pixels()[3 * k + 1];
        p2[k] = f.pixels()[3 * k + 2];
      }
    } else {
      acc_b.assign(p1.size(), 0.0);
      acc_r.assign(p1.size(), 0.0);
      cnt.assign(p1.size(), 0.0);
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          double yy, cb, cr;
          rgb_to_ycbcr(f.at(x, y, 0), f.at(x, y, 1), f.at(x, y, 2), yy, cb, cr);
          p0[std::size_t(y) * w + x] = clamp_u8(yy);
          const std::size_t ci = is420 ? std::size_t(y / 2) * cw + x / 2 : std::size_t(y) * w + x;
          acc_b[ci] += cb;
          acc_r[ci] += cr;
          cnt[ci] += 1.0;
        }
      }
      for (std::size_t k = 0; k < p1.size(); ++k) {
        p1[k] = clamp_u8(acc_b[k] / cnt[k]);
        p2[k] = clamp_u8(acc_r[k] / cnt[k]);
      }
    }
    out << "FRAME\n";
    out.write(reinterpret_cast<const char*>(p0.data()), std::streamsize(p0.size()));
    out.write(reinterpret_cast<const char*>(p1.data()), std::streamsize(p1.size()));
    out.write(reinterpret_cast<const char*>(p2.data()), std::streamsize(p2.size()));
  }
  out.close();
  if (!out) throw Error("failed writing " + path.string());
  return fs::file_size(path);
}

// Numeric stems sort by value; anything else falls back to lexical order.
bool frame_name_less(const fs::path& a, const fs::path& b) {
  const std::string sa = a.stem().string(), sb = b.stem().string();
  long long va = 0, vb = 0;
  const auto ra = std::from_chars(sa.data(), sa.data() + sa.size(), va);
  const auto rb = std::from_chars(sb.data(), sb.data() + sb.size(), vb);
  const bool na = ra.ec == std::errc{} && ra.ptr == sa.data() + sa.size();
  const bool nb = rb.ec == std::errc{} && rb.ptr == sb.data() + sb.size();
  if (na && nb && va != vb) return va < vb;
  return sa < sb;
}

std::vector<fs::path> list_pngs(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end(), frame_name_less);
  return files;
}

}  // namespace

SequenceKind infer_kind(const fs::path& path) {
  if (!fs::exists(path)) throw Error("missing path: " + path.string());
  if (fs::is_directory(path)) return SequenceKind::png_directory;
  if (path.extension() == ".y4m") return SequenceKind::y4m_file;
  throw Error("cannot infer sequence kind of " + path.string());
}

fs::path frame_file_name(int index) {
  char name[32];
  std::snprintf(name, sizeof name, "%05d.png", index + 1);
  return name;
}

Frame read_png(const fs::path& file) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, file.c_str()))
    throw Error("cannot read PNG " + file.string() + ": " + image.message);
  image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> rgb(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, rgb.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error("cannot decode PNG " + file.string() + ": " + msg);
  }
  if (image.warning_or_error & PNG_IMAGE_ERROR) throw Error("PNG error in " + file.string());
  return Frame(int(image.width), int(image.height), std::move(rgb));
}

namespace {
void write_png_format(int width, int height, const std::uint8_t* data, png_uint_32 format,
                      const fs::path& file) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = png_uint_32(width);
  image.height = png_uint_32(height);
  image.format = format;
  if (!png_image_write_to_file(&image, file.c_str(), 0, data, 0, nullptr))
    throw Error("cannot write PNG " + file.string() + ": " + image.message);
}
}  // namespace

void write_png(const Frame& frame, const fs::path& file) {
  write_png_format(frame.width(), frame.height(), frame.pixels().data(), PNG_FORMAT_RGB, file);
}

void write_gray_png(int width, int height, std::span<const std::uint8_t> gray, const fs::path& file) {
  if (gray.size() != std::size_t(width) * height) throw Error("mask buffer size mismatch");
  write_png_format(width, height, gray.data(), PNG_FORMAT_GRAY, file);
}

FrameSequence load_sequence(const fs::path& path, SequenceKind kind, FrameRate default_rate) {
  if (!fs::exists(path)) throw Error("missing path: " + path.string());
  FrameSequence seq;
  if (kind == SequenceKind::y4m_file) {
    seq = load_y4m(path);
  } else {
    if (!fs::is_directory(path)) throw Error("not a directory: " + path.string());
    seq.frame_rate = default_rate;
    for (const fs::path& f : list_pngs(path)) seq.frames.push_back(read_png(f));
    seq.original_width = seq.width();
    seq.original_height = seq.height();
  }
  if (seq.empty()) throw Error("no frames in " + path.string());
  seq.check_uniform();
  return seq;
}

FrameSequence load_sequence(const fs::path& path) { return load_sequence(path, infer_kind(path)); }

std::uintmax_t write_sequence(const FrameSequence& seq, const fs::path& path, SequenceKind kind,
                              Y4mColor color) {
  if (seq.empty()) throw Error("no frames");
  seq.check_uniform();
  if (kind == SequenceKind::y4m_file) return write_y4m(seq, path, color);

  std::error_code ec;
  fs::create_directories(path, ec);
  if (!fs::is_directory(path)) throw Error("cannot create directory " + path.string());
  std::uintmax_t total = 0;
  for (int n = 0; n < seq.size(); ++n) {
    const fs::path file = path / frame_file_name(n);
    write_png(seq.frames[n], file);
    total += fs::file_size(file);
  }
  return total;
}

FrameSequence scale_sequence(const FrameSequence& seq, int width, int height, bool nearest) {
  if (width <= 0 || height <= 0 || (width == seq.width() && height == seq.height())) return seq;
  FrameSequence out;
  out.frame_rate = seq.frame_rate;
  out.original_width = width;
  out.original_height = height;
  out.frames.reserve(seq.frames.size());
  const int sw = seq.width(), sh = seq.height();
  const double fx = double(sw) / width, fy = double(sh) / height;
  for (const Frame& src : seq.frames) {
    Frame dst(width, height);
    for (int y = 0; y < height; ++y) {
      const double sy = std::clamp((y + 0.5) * fy - 0.5, 0.0, double(sh - 1));
      const int y0 = int(sy), y1 = std::min(y0 + 1, sh - 1);
      const double wy = sy - y0;
      for (int x = 0; x < width; ++x) {
        const double sx = std::clamp((x + 0.5) * fx - 0.5, 0.0, double(sw - 1));
        const int x0 = int(sx), x1 = std::min(x0 + 1, sw - 1);
        const double wx = sx - x0;
        for (int c = 0; c < 3; ++c) {
          if (nearest) {
            dst.at(x, y, c) = src.at(std::min(int(std::lround(sx)), sw - 1), std::min(int(std::lround(sy)), sh - 1), c);
            continue;
          }
          const double top = src.at(x0, y0, c) * (1 - wx) + src.at(x1, y0, c) * wx;
          const double bot = src.at(x0, y1, c) * (1 - wx) + src.at(x1, y1, c) * wx;
          dst.at(x, y, c) = clamp_u8(top * (1 - wy) + bot * wy);
        }
      }
    }
    out.frames.push_back(std::move(dst));
  }
  return out;
}

FrameSequence align_to_blocks(const FrameSequence& seq, int block_size) {
  static constexpr std::array kAllowed{8, 16, 32, 64};
  if (std::find(kAllowed.begin(), kAllowed.end(), block_size) == kAllowed.end())
    throw Error("block size must be one of 8, 16, 32, 64");
  FrameSequence out;
  out.frame_rate = seq.frame_rate;
  out.original_width = seq.original_width > 0 ? seq.original_width : seq.width();
  out.original_height = seq.original_height > 0 ? seq.original_height : seq.height();
  const int w = seq.width(), h = seq.height();
  const int aw = (w + block_size - 1) / block_size * block_size;
  const int ah = (h + block_size - 1) / block_size * block_size;
  if (aw == w && ah == h) {
    out.frames = seq.frames;
    return out;
  }
  out.frames.reserve(seq.frames.size());
  for (const Frame& src : seq.frames) {
    Frame dst(aw, ah);
    for (int y = 0; y < ah; ++y) {
      const std::uint8_t* s = src.row(std::min(y, h - 1));
      std::uint8_t* d = dst.row(y);
      std::memcpy(d, s, std::size_t(w) * 3);
      for (int x = w; x < aw; ++x) std::memcpy(d + 3 * x, s + 3 * (w - 1), 3);
    }
    out.frames.push_back(std::move(dst));
  }
  return out;
}

FrameSequence crop_to_original(const FrameSequence& seq) {
  const int ow = seq.original_width > 0 ? seq.original_width : seq.width();
  const int oh = seq.original_height > 0 ? seq.original_height : seq.height();
  if (ow == seq.width() && oh == seq.height()) return seq;
  if (ow > seq.width() || oh > seq.height()) throw Error("original size exceeds frame size");
  FrameSequence out;
  out.frame_rate = seq.frame_rate;
  out.original_width = ow;
  out.original_height = oh;
  for (const Frame& src : seq.frames) {
    Frame dst(ow, oh);
    for (int y = 0; y < oh; ++y) std::memcpy(dst.row(y), src.row(y), std::size_t(ow) * 3);
    out.frames.push_back(std::move(dst));
  }
  return out;
}

double mean_abs_luma_difference(const Frame& a, const Frame& b) {
  if (a.width() != b.width() || a.height() != b.height()) throw Error("inconsistent dimensions");
  const auto la = a.luma(), lb = b.luma();
  std::uint64_t sum = 0;
  for (std::size_t k = 0; k < la.size(); ++k) sum += std::uint64_t(std::abs(int(la[k]) - int(lb[k])));
  return double(sum) / double(la.size());
}

std::vector<FrameSequence> split_scenes(const FrameSequence& seq, double threshold) {
  if (threshold < 0) throw Error("scene threshold must be non-negative");
  std::vector<FrameSequence> segments;
  auto start_segment = [&] {
    FrameSequence s;
    s.frame_rate = seq.frame_rate;
    s.original_width = seq.original_width;
    s.original_height = seq.original_height;
    segments.push_back(std::move(s));
  };
  if (seq.empty()) return segments;
  start_segment();
  for (int n = 0; n < seq.size(); ++n) {
    if (n > 0 && mean_abs_luma_difference(seq.frames[n - 1], seq.frames[n]) > threshold) start_segment();
    segments.back().frames.push_back(seq.frames[n]);
  }
  return segments;
}

}  // namespace elvis
