#include "elvis/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <vector>

#include "elvis/error.hpp"
#include "elvis/subprocess.hpp"
#include "json.hpp"

namespace elvis {

namespace {

void check_comparable(const FrameSequence& a, const FrameSequence& b) {
  if (a.size() != b.size() || a.width() != b.width() || a.height() != b.height())
    throw Error("geometry mismatch between compared sequences");
  if (a.empty()) throw Error("no frames");
}

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = (0.01 * 255) * (0.01 * 255);
constexpr double kC2 = (0.03 * 255) * (0.03 * 255);

std::array<double, kWindow> gaussian_taps() {
  std::array<double, kWindow> g{};
  double sum = 0.0;
  for (int k = 0; k < kWindow; ++k) {
    const double d = k - kWindow / 2;
    g[k] = std::exp(-d * d / (2 * kSigma * kSigma));
    sum += g[k];
  }
  for (double& v : g) v /= sum;
  return g;
}

// Mean SSIM over valid window positions of one frame, separable filtering.
double ssim_frame(const std::vector<std::uint8_t>& la, const std::vector<std::uint8_t>& lb, int w, int h) {
  static const auto g = gaussian_taps();
  const int ow = w - kWindow + 1, oh = h - kWindow + 1;
  // Horizontal pass: five moments, each (ow x h).
  std::vector<double> hx(std::size_t(ow) * h), hy(hx.size()), hxx(hx.size()), hyy(hx.size()), hxy(hx.size());
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* ra = la.data() + std::size_t(y) * w;
    const std::uint8_t* rb = lb.data() + std::size_t(y) * w;
    for (int x = 0; x < ow; ++x) {
      double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
      for (int k = 0; k < kWindow; ++k) {
        const double p = ra[x + k], q = rb[x + k];
        sx += g[k] * p;
        sy += g[k] * q;
        sxx += g[k] * p * p;
        syy += g[k] * q * q;
        sxy += g[k] * p * q;
      }
      const std::size_t o = std::size_t(y) * ow + x;
      hx[o] = sx, hy[o] = sy, hxx[o] = sxx, hyy[o] = syy, hxy[o] = sxy;
    }
  }
  double total = 0.0;
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double mx = 0, my = 0, exx = 0, eyy = 0, exy = 0;
      for (int k = 0; k < kWindow; ++k) {
        const std::size_t o = std::size_t(y + k) * ow + x;
        mx += g[k] * hx[o];
        my += g[k] * hy[o];
        exx += g[k] * hxx[o];
        eyy += g[k] * hyy[o];
        exy += g[k] * hxy[o];
      }
      const double vx = exx - mx * mx, vy = eyy - my * my, cxy = exy - mx * my;
      total += ((2 * mx * my + kC1) * (2 * cxy + kC2)) / ((mx * mx + my * my + kC1) * (vx + vy + kC2));
    }
  }
  return total / (double(ow) * oh);
}

}  // namespace

double mse(const FrameSequence& a, const FrameSequence& b) {
  check_comparable(a, b);
  std::vector<std::uint64_t> per_frame(a.frames.size(), 0);
#pragma omp parallel for schedule(static)
  for (int n = 0; n < a.size(); ++n) {
    const auto pa = a.frames[n].pixels(), pb = b.frames[n].pixels();
    std::uint64_t s = 0;
    for (std::size_t k = 0; k < pa.size(); ++k) {
      const int d = int(pa[k]) - int(pb[k]);
      s += std::uint64_t(d * d);
    }
    per_frame[n] = s;
  }
  std::uint64_t total = 0;
  for (auto s : per_frame) total += s;
  return double(total) / (double(a.frames.front().pixels().size()) * a.size());
}

double psnr_from_mse(double m, double peak) {
  if (m < 0) throw Error("negative MSE");
  if (m == 0.0) return kPsnrCapDb;
  return std::min(kPsnrCapDb, 10.0 * std::log10(peak * peak / m));
}

double psnr(const FrameSequence& a, const FrameSequence& b, double peak) {
  return psnr_from_mse(mse(a, b), peak);
}

double ssim(const Frame& a, const Frame& b) {
  if (a.width() != b.width() || a.height() != b.height()) throw Error("geometry mismatch between compared frames");
  if (a.width() < kWindow || a.height() < kWindow) throw Error("frames are smaller than the 11x11 SSIM window");
  return ssim_frame(a.luma(), b.luma(), a.width(), a.height());
}

double ssim(const FrameSequence& a, const FrameSequence& b) {
  check_comparable(a, b);
  if (a.width() < kWindow || a.height() < kWindow) throw Error("frames are smaller than the 11x11 SSIM window");
  std::vector<double> per_frame(a.frames.size());
#pragma omp parallel for schedule(dynamic)
  for (int n = 0; n < a.size(); ++n)
    per_frame[n] = ssim_frame(a.frames[n].luma(), b.frames[n].luma(), a.width(), a.height());
  double total = 0.0;
  for (double s : per_frame) total += s;
  return total / a.size();
}

QualityReport measure_quality(const FrameSequence& ref, const FrameSequence& dist) {
  QualityReport q;
  q.mse = mse(ref, dist);
  q.psnr = psnr_from_mse(q.mse);
  q.ssim = ssim(ref, dist);
  return q;
}

double parse_metric_output(const std::string& output, const MetricSelector& sel) {
  if (!sel.json_path.empty()) {
    nlohmann::json doc = nlohmann::json::parse(output, nullptr, false);
    if (doc.is_discarded()) {
      const auto open = output.find('{'), close = output.rfind('}');
      if (open != std::string::npos && close != std::string::npos && close > open)
        doc = nlohmann::json::parse(output.substr(open, close - open + 1), nullptr, false);
    }
    if (doc.is_discarded()) throw Error("metric parse error: output is not JSON");
    const nlohmann::json* node = &doc;
    std::stringstream path(sel.json_path);
    std::string key;
    while (std::getline(path, key, '.')) {
      if (node->is_array()) {
        char* end = nullptr;
        const long idx = std::strtol(key.c_str(), &end, 10);
        if (*end || idx < 0 || std::size_t(idx) >= node->size())
          throw Error("metric parse error: bad index " + key);
        node = &(*node)[std::size_t(idx)];
      } else if (node->is_object() && node->contains(key)) {
        node = &(*node)[key];
      } else {
        throw Error("metric parse error: missing key " + key);
      }
    }
    if (!node->is_number()) throw Error("metric parse error: " + sel.json_path + " is not a number");
    return node->get<double>();
  }
  std::istringstream in(output);
  std::string line, last;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    last = line.substr(b, line.find_last_not_of(" \t\r") - b + 1);
  }
  if (last.empty()) throw Error("metric parse error: empty output");
  char* end = nullptr;
  const double v = std::strtod(last.c_str(), &end);
  if (end == last.c_str() || *end != '\0' || !std::isfinite(v))
    throw Error("metric parse error: '" + last + "' is not a number");
  return v;
}

double external_metric(const std::string& command, const std::string& ref_path, const std::string& dist_path,
                       const MetricSelector& sel) {
  const auto r = run_checked(expand_template(command, {{"ref", ref_path}, {"dist", dist_path}}), "metric tool");
  return parse_metric_output(r.output, sel);
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error("pearson: length mismatch");
  if (xs.size() < 2) throw Error("pearson: need at least two samples");
  const double n = double(xs.size());
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) mx += xs[k], my += ys[k];
  mx /= n;
  my /= n;
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double dx = xs[k] - mx, dy = ys[k] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error("pearson: undefined correlation for constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace elvis
