#pragma once

#include <optional>
#include <span>
#include <string>

#include "elvis/frame.hpp"

namespace elvis {

inline constexpr double kPsnrCapDb = 100.0;

struct QualityReport {
  double mse = 0.0;
  double psnr = kPsnrCapDb;
  double ssim = 1.0;
  std::optional<double> vmaf;
  std::optional<double> lpips;
};

// Mean squared error over all frames, pixels and channels, 8-bit domain.
double mse(const FrameSequence& a, const FrameSequence& b);

// 10*log10(peak^2 / mse), capped at 100 dB.
double psnr_from_mse(double mse, double peak = 255.0);
double psnr(const FrameSequence& a, const FrameSequence& b, double peak = 255.0);

// Single-scale SSIM on luma: 11x11 Gaussian window (sigma 1.5), K1 = 0.01,
// K2 = 0.03, L = 255, averaged over every full window position of every frame.
double ssim(const FrameSequence& a, const FrameSequence& b);
double ssim(const Frame& a, const Frame& b);

QualityReport measure_quality(const FrameSequence& reference, const FrameSequence& distorted);

// How the scalar is pulled out of an external tool's output.
struct MetricSelector {
  std::string json_path;  // dot-separated, e.g. "pooled_metrics.vmaf.mean"; empty = last line
};

// Runs `command` with `{ref}` and `{dist}` substituted and parses one scalar.
double external_metric(const std::string& command, const std::string& ref_path, const std::string& dist_path,
                       const MetricSelector& selector = {});

// Parses a scalar from tool output per the selector; throws on malformed output.
double parse_metric_output(const std::string& output, const MetricSelector& selector);

// Sample Pearson correlation. Throws for length mismatch, fewer than two
// samples, or a constant input.
double pearson(std::span<const double> xs, std::span<const double> ys);

namespace reference {
double mse(const FrameSequence& a, const FrameSequence& b);
double ssim(const FrameSequence& a, const FrameSequence& b);
}  // namespace reference

}  // namespace elvis
