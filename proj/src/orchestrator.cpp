#include "elvis/orchestrator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "elvis/analysis.hpp"
#include "elvis/error.hpp"
#include "elvis/media_io.hpp"
#include "elvis/resample.hpp"
#include "elvis/selection.hpp"
#include "elvis/sidecar.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace elvis {

// ---------------------------------------------------------------------------
// Configuration

std::string ExperimentConfig::canonical() const {
  char reals[160];
  std::snprintf(reals, sizeof reals, "removed_fraction=%.6f;alpha=%.6f;beta=%.6f;scene_threshold=%.6f",
                removed_fraction, alpha, beta, scene_threshold);
  std::ostringstream out;
  out << "video=" << video << ";block_size=" << block_size << ';' << reals << ";width=" << width
      << ";height=" << height << ";codec=" << codec << ";inpainter=" << inpainter
      << ";mask_source=" << mask_source << ";seed=" << seed;
  return out.str();
}

std::string ExperimentConfig::id() const {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

std::string ExperimentConfig::video_name() const {
  fs::path p(video);
  if (!p.has_filename()) p = p.parent_path();
  return p.stem().string();
}

namespace {

Y4mColor parse_color(const std::string& s) {
  if (s == "rgb444") return Y4mColor::rgb444;
  if (s == "yuv444") return Y4mColor::ycbcr444;
  if (s == "yuv420") return Y4mColor::ycbcr420;
  throw Error("unknown y4m colour layout: " + s);
}

bool parse_bool(const std::string& s) {
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off" || s.empty()) return false;
  throw Error("invalid boolean: " + s);
}

}  // namespace

PipelineSettings PipelineSettings::from(const KeyValues& kv) {
  PipelineSettings s;
  for (const auto& [key, value] : kv.values()) {
    if (key.rfind("codec.", 0) != 0) continue;
    const auto dot = key.find('.', 6);
    if (dot == std::string::npos) continue;
    const std::string name = key.substr(6, dot - 6);
    const std::string field = key.substr(dot + 1);
    ExternalCodec& c = s.codecs[name];
    c.name = name;
    if (field == "encode") c.encode_command = value;
    else if (field == "decode") c.decode_command = value;
    else if (field == "q_min") c.q_min = parse_int(value, key);
    else if (field == "q_max") c.q_max = parse_int(value, key);
    else if (field == "q") c.quality = parse_int(value, key);
    else if (field == "ext") c.extension = value;
    else if (field == "color") c.input_color = parse_color(value);
    else throw Error("unknown codec setting: " + key);
  }
  for (const auto& [name, c] : s.codecs)
    if (c.encode_command.empty() || c.decode_command.empty())
      throw Error("codec " + name + " needs both encode and decode commands");
  s.benchmark_codec = kv.get("benchmark_codec");
  s.size_tolerance = kv.get_double("size_tolerance", s.size_tolerance);
  s.inpaint_command = kv.get("inpaint.external.command");
  s.diffusion.tol = kv.get_double("diffusion.tol", s.diffusion.tol);
  s.diffusion.max_iters = kv.get_int("diffusion.max_iters", s.diffusion.max_iters);
  s.motion_quantile = kv.get_double("motion_quantile", s.motion_quantile);
  s.mask_coverage = kv.get_double("mask_coverage", s.mask_coverage);
  if (kv.has("frame_rate")) {
    const double fps = kv.get_double("frame_rate", 30.0);
    s.frame_rate = {int(std::lround(fps * 1000)), 1000};
  }
  s.primary_metric = kv.get("primary_metric", s.primary_metric);
  s.vmaf_command = kv.get("metric.vmaf.command");
  s.vmaf_json_path = kv.get("metric.vmaf.json_path");
  s.lpips_command = kv.get("metric.lpips.command");
  s.lpips_json_path = kv.get("metric.lpips.json_path");
  s.keep_artifacts = parse_bool(kv.get("keep_artifacts", "false"));

  static const std::vector<std::string> metrics{"psnr", "ssim", "mse", "vmaf", "lpips"};
  if (std::find(metrics.begin(), metrics.end(), s.primary_metric) == metrics.end())
    throw Error("unknown primary metric: " + s.primary_metric);
  if (s.primary_metric == "vmaf" && s.vmaf_command.empty())
    throw Error("primary_metric = vmaf requires metric.vmaf.command");
  if (s.primary_metric == "lpips" && s.lpips_command.empty())
    throw Error("primary_metric = lpips requires metric.lpips.command");
  if (!s.benchmark_codec.empty() && !s.codecs.count(s.benchmark_codec))
    throw Error("benchmark_codec names an undeclared codec: " + s.benchmark_codec);
  return s;
}

std::vector<std::string> known_config_keys() {
  return {"video",        "block_size",     "removed_fraction", "alpha",
          "beta",         "resolution",     "width",            "height",
          "codec",        "inpainter",      "mask_source",      "scene_threshold",
          "seed",         "benchmark_codec", "size_tolerance",  "inpaint.external.command",
          "diffusion.tol", "diffusion.max_iters", "motion_quantile", "mask_coverage",
          "frame_rate",   "primary_metric", "metric.vmaf.command", "metric.vmaf.json_path",
          "metric.lpips.command", "metric.lpips.json_path", "keep_artifacts", "workers",
          "budget"};
}

ExperimentGrid ExperimentGrid::from(const KeyValues& kv) {
  ExperimentGrid g;
  auto reals = [&](const std::string& key, double fallback) {
    std::vector<double> out;
    if (!kv.has(key)) return std::vector<double>{fallback};
    for (const auto& v : kv.get_list(key)) {
      const double x = parse_double(v, key);
      if (!(x >= 0.0 && x <= 1.0)) throw Error(key + " values must lie in [0,1]");
      out.push_back(x);
    }
    return out;
  };
  g.videos = kv.get_list("video");
  if (!kv.has("block_size")) {
    g.block_sizes = {16};
  } else {
    for (const auto& v : kv.get_list("block_size")) {
      const int b = parse_int(v, "block_size");
      if (b != 8 && b != 16 && b != 32 && b != 64) throw Error("block_size must be one of 8, 16, 32, 64");
      g.block_sizes.push_back(b);
    }
  }
  g.removed_fractions = reals("removed_fraction", 0.25);
  g.alphas = reals("alpha", 0.5);
  g.betas = reals("beta", 0.5);

  if (kv.has("resolution")) {
    for (const auto& v : kv.get_list("resolution")) {
      if (v == "native") {
        g.resolutions.emplace_back(0, 0);
        continue;
      }
      const auto x = v.find('x');
      if (x == std::string::npos) throw Error("resolution must be WIDTHxHEIGHT: " + v);
      g.resolutions.emplace_back(parse_int(v.substr(0, x), "width"), parse_int(v.substr(x + 1), "height"));
    }
  } else if (kv.has("width") || kv.has("height")) {
    const auto ws = kv.get_list("width"), hs = kv.get_list("height");
    if (ws.size() != hs.size()) throw Error("width and height lists are paired and must have equal length");
    for (std::size_t k = 0; k < ws.size(); ++k)
      g.resolutions.emplace_back(parse_int(ws[k], "width"), parse_int(hs[k], "height"));
  } else {
    g.resolutions = {{0, 0}};
  }
  for (const auto& [w, h] : g.resolutions)
    if (w < 0 || h < 0 || (w == 0) != (h == 0)) throw Error("invalid resolution");

  g.codecs = kv.has("codec") ? kv.get_list("codec") : std::vector<std::string>{"null"};
  g.inpainters = kv.has("inpainter") ? kv.get_list("inpainter") : std::vector<std::string>{"temporal-copy"};
  for (const auto& name : g.inpainters) parse_inpaint_backend(name);
  g.mask_source = kv.get("mask_source", g.mask_source);
  g.scene_threshold = kv.get_double("scene_threshold", g.scene_threshold);
  if (g.scene_threshold < 0) throw Error("scene_threshold must be non-negative");
  g.seed = kv.get_int("seed", 0);
  return g;
}

std::size_t ExperimentGrid::size() const {
  return videos.size() * block_sizes.size() * removed_fractions.size() * alphas.size() * betas.size() *
         resolutions.size() * codecs.size() * inpainters.size();
}

std::vector<ExperimentConfig> enumerate(const ExperimentGrid& g, std::size_t budget) {
  if (g.size() == 0) throw Error("empty grid");
  std::vector<ExperimentConfig> out;
  for (const auto& video : g.videos)
    for (int b : g.block_sizes)
      for (double r : g.removed_fractions)
        for (double a : g.alphas)
          for (double be : g.betas)
            for (const auto& [w, h] : g.resolutions)
              for (const auto& codec : g.codecs)
                for (const auto& inp : g.inpainters) {
                  if (out.size() >= budget) return out;
                  ExperimentConfig c;
                  c.video = video;
                  c.block_size = b;
                  c.removed_fraction = r;
                  c.alpha = a;
                  c.beta = be;
                  c.width = w;
                  c.height = h;
                  c.codec = codec;
                  c.inpainter = inp;
                  c.mask_source = g.mask_source;
                  c.scene_threshold = g.scene_threshold;
                  c.seed = g.seed;
                  out.push_back(std::move(c));
                }
  return out;
}

// ---------------------------------------------------------------------------
// Single experiment

double ExperimentRecord::stage_sum() const {
  double s = 0.0;
  for (const auto& [k, v] : stage_seconds) s += v;
  return s;
}

double primary_score(const QualityReport& q, const std::string& metric) {
  if (metric == "psnr") return q.psnr;
  if (metric == "ssim") return q.ssim;
  if (metric == "mse") return -q.mse;
  if (metric == "vmaf") {
    if (!q.vmaf) throw Error("VMAF not measured");
    return *q.vmaf;
  }
  if (metric == "lpips") {
    if (!q.lpips) throw Error("LPIPS not measured");
    return -*q.lpips;
  }
  throw Error("unknown primary metric: " + metric);
}

std::string choose_delivery(double inpainted_score, double benchmark_score) {
  return inpainted_score < benchmark_score ? "benchmark" : "inpainted";
}

namespace {

using Clock = std::chrono::steady_clock;

class StageTimer {
 public:
  explicit StageTimer(ExperimentRecord& rec) : rec_(rec) {}

  // Runs fn, adds its wall time to the named stage and tags failures.
  template <class Fn>
  auto run(const std::string& stage, Fn&& fn) {
    const auto start = Clock::now();
    struct Accumulate {
      ExperimentRecord& rec;
      const std::string& stage;
      Clock::time_point start;
      ~Accumulate() { rec.stage_seconds[stage] += std::chrono::duration<double>(Clock::now() - start).count(); }
    } acc{rec_, stage, start};
    try {
      return fn();
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(stage, e.what());
    }
  }

 private:
  ExperimentRecord& rec_;
};

struct Encoded {
  EncodedArtifact artifact;
  const ExternalCodec* codec = nullptr;  // null for the lossless codec
};

Encoded encode_with(const FrameSequence& seq, const std::string& codec_name, const PipelineSettings& s,
                    const fs::path& dir) {
  if (codec_name == "null") return {encode_null(seq, dir / "null"), nullptr};
  const auto it = s.codecs.find(codec_name);
  if (it == s.codecs.end()) throw Error("unknown codec: " + codec_name);
  return {encode_external(seq, it->second, it->second.default_quality(), dir), &it->second};
}

FrameSequence decode_with(const Encoded& e, const fs::path& dir) {
  return e.codec ? decode_external(e.artifact, *e.codec, dir) : decode_null(e.artifact);
}

void measure_external(QualityReport& q, const FrameSequence& ref, const FrameSequence& dist,
                      const PipelineSettings& s, const fs::path& dir, const std::string& tag) {
  if (s.vmaf_command.empty() && s.lpips_command.empty()) return;
  const fs::path ref_file = dir / "reference.y4m";
  const fs::path dist_file = dir / (tag + ".y4m");
  if (!fs::exists(ref_file)) write_sequence(ref, ref_file, SequenceKind::y4m_file, Y4mColor::ycbcr420);
  write_sequence(dist, dist_file, SequenceKind::y4m_file, Y4mColor::ycbcr420);
  if (!s.vmaf_command.empty())
    q.vmaf = external_metric(s.vmaf_command, ref_file.string(), dist_file.string(), {s.vmaf_json_path});
  if (!s.lpips_command.empty())
    q.lpips = external_metric(s.lpips_command, ref_file.string(), dist_file.string(), {s.lpips_json_path});
}

FrameSequence slice(const FrameSequence& seq, int begin, int count) {
  FrameSequence out;
  out.frame_rate = seq.frame_rate;
  out.original_width = seq.original_width;
  out.original_height = seq.original_height;
  out.frames.assign(seq.frames.begin() + begin, seq.frames.begin() + begin + count);
  return out;
}

std::string expand_video(const std::string& pattern, const std::string& name) {
  std::string out = pattern;
  for (std::size_t pos; (pos = out.find("{video}")) != std::string::npos;) out.replace(pos, 7, name);
  return out;
}

}  // namespace

ExperimentRecord run_experiment(const ExperimentConfig& cfg, const PipelineSettings& s,
                                const fs::path& artifacts_root) {
  const auto t0 = Clock::now();
  ExperimentRecord rec;
  rec.config = cfg;
  rec.id = cfg.id();
  rec.primary_metric = s.primary_metric;
  for (const char* stage : kStages) rec.stage_seconds[stage] = 0.0;
  const fs::path dir = artifacts_root / rec.id;
  StageTimer timer(rec);

  try {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir)) throw StageError("setup", "cannot create " + dir.string());

    FrameSequence source;
    FrameSequence pixel_masks;
    try {
      source = load_sequence(cfg.video, infer_kind(cfg.video), s.frame_rate);
      source = scale_sequence(source, cfg.width, cfg.height);
      source.original_width = source.width();
      source.original_height = source.height();
      if (cfg.mask_source != "none" && cfg.mask_source != "motion") {
        pixel_masks = load_sequence(expand_video(cfg.mask_source, cfg.video_name()), SequenceKind::png_directory);
        pixel_masks = scale_sequence(pixel_masks, source.width(), source.height(), true);
      }
    } catch (const std::exception& e) {
      throw StageError("load", e.what());
    }
    const InpaintBackend backend = parse_inpaint_backend(cfg.inpainter);
    const auto segments = split_scenes(source, cfg.scene_threshold);
    rec.segments = int(segments.size());
    rec.frames = source.size();

    FrameSequence restored;
    restored.frame_rate = source.frame_rate;
    restored.original_width = source.width();
    restored.original_height = source.height();
    int offset = 0;
    for (std::size_t segno = 0; segno < segments.size(); ++segno) {
      const FrameSequence& segment = segments[segno];
      const fs::path segdir = dir / ("segment" + std::to_string(segno));
      fs::create_directories(segdir);
      const int b = cfg.block_size;

      // Server side.
      FrameSequence aligned;
      ComplexityTensors tensors;
      SaliencyMask saliency;
      timer.run("analyze", [&] {
        aligned = align_to_blocks(segment, b);
        tensors = analyze_complexity(aligned, b);
        const BlockGeometry g = geometry_of(aligned, b);
        if (cfg.mask_source == "none") {
          saliency = empty_saliency(g.rows(), g.cols(), g.frame_count);
        } else if (cfg.mask_source == "motion") {
          saliency = motion_saliency(tensors.temporal, s.motion_quantile);
        } else {
          if (pixel_masks.size() < offset + segment.size()) throw Error("missing frame mask");
          saliency = block_mask(slice(pixel_masks, offset, segment.size()), g, s.mask_coverage);
        }
      });
      const RemovalPlan plan = timer.run("select", [&] {
        return select_blocks(tensors.spatial, tensors.temporal, saliency.m,
                             {cfg.alpha, cfg.beta, cfg.removed_fraction});
      });
      const FrameSequence shrunk = timer.run("shrink", [&] { return shrink_sequence(aligned, plan, b); });
      const SidecarGeometry sg{segment.width(), segment.height(), b, segment.size()};
      std::vector<std::uint8_t> sidecar;
      const Encoded encoded = timer.run("encode", [&] {
        Encoded e = encode_with(shrunk, cfg.codec, s, segdir);
        sidecar = encode_sidecar(plan, sg);
        write_sidecar_file(sidecar, segdir / "plan.elvs");
        return e;
      });
      rec.shrunk_encoded_bytes += encoded.artifact.size;
      rec.sidecar_bytes += sidecar.size();

      // Client side.
      FrameSequence decoded;
      DecodedSidecar meta;
      timer.run("decode", [&] {
        decoded = decode_with(encoded, segdir);
        meta = decode_sidecar(read_sidecar_file(segdir / "plan.elvs"));
        if (decoded.size() != meta.geometry.frame_count)
          throw Error("decoded frame count does not match the sidecar");
      });
      const FrameSequence stretched =
          timer.run("stretch", [&] { return stretch_sequence(decoded, meta.plan, meta.geometry.block_size); });
      FrameSequence inpainted = timer.run("inpaint", [&] {
        InpaintRequest req{stretched, meta.plan.to_mask(), meta.geometry.block_size};
        switch (backend) {
          case InpaintBackend::diffusion: return inpaint_diffusion(req, s.diffusion);
          case InpaintBackend::temporal_copy: return inpaint_temporal_copy(req, s.diffusion);
          case InpaintBackend::external:
            if (s.inpaint_command.empty()) throw Error("inpaint.external.command is not configured");
            return inpaint_external(req, {s.inpaint_command, segdir / "inpaint"});
        }
        throw Error("unreachable");
      });
      inpainted.original_width = meta.geometry.original_width;
      inpainted.original_height = meta.geometry.original_height;
      inpainted = crop_to_original(inpainted);
      for (auto& f : inpainted.frames) restored.frames.push_back(std::move(f));
      offset += segment.size();
    }

    // Size-matched benchmark: same content, same resolution, same byte budget
    // (shrunk video plus sidecar), no removal.
    const auto tb = Clock::now();
    FrameSequence bench_decoded;
    try {
      const fs::path bdir = dir / "benchmark";
      fs::create_directories(bdir);
      const std::string bcodec = cfg.codec != "null" ? cfg.codec : s.benchmark_codec;
      const std::uintmax_t target = rec.shrunk_encoded_bytes + rec.sidecar_bytes;
      if (bcodec.empty()) {
        const EncodedArtifact a = encode_null(source, bdir / "null");
        rec.benchmark_bytes = a.size;
        bench_decoded = decode_null(a);
      } else {
        const auto it = s.codecs.find(bcodec);
        if (it == s.codecs.end()) throw Error("unknown codec: " + bcodec);
        const SizeMatch m = match_size_benchmark(source, target, s.size_tolerance, it->second, bdir);
        rec.benchmark_bytes = m.artifact.size;
        rec.benchmark_q = m.artifact.quality_param;
        rec.benchmark_size_matched = m.within_tolerance;
        bench_decoded = decode_external(m.artifact, it->second, bdir);
      }
    } catch (const std::exception& e) {
      throw StageError("benchmark", e.what());
    }
    rec.benchmark_seconds = std::chrono::duration<double>(Clock::now() - tb).count();

    timer.run("metrics", [&] {
      rec.inpainted = measure_quality(source, restored);
      rec.benchmark = measure_quality(source, bench_decoded);
      measure_external(rec.inpainted, source, restored, s, dir, "inpainted");
      measure_external(rec.benchmark, source, bench_decoded, s, dir, "benchmark");
      rec.primary_inpainted = primary_score(rec.inpainted, s.primary_metric);
      rec.primary_benchmark = primary_score(rec.benchmark, s.primary_metric);
    });
    rec.delivered = choose_delivery(rec.primary_inpainted, rec.primary_benchmark);
    if (s.keep_artifacts) {
      write_sequence(restored, dir / "inpainted", SequenceKind::png_directory);
    }
    rec.ok = true;
  } catch (const StageError& e) {
    rec.ok = false;
    rec.failed_stage = e.stage();
    rec.error = e.what();
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.failed_stage = "setup";
    rec.error = e.what();
  }

  if (!s.keep_artifacts) {
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec))
      if (entry.path().filename() != "record.json") fs::remove_all(entry.path(), ec);
  }
  rec.total_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return rec;
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

json quality_json(const QualityReport& q) {
  json j{{"mse", q.mse}, {"psnr", q.psnr}, {"ssim", q.ssim}};
  j["vmaf"] = q.vmaf ? json(*q.vmaf) : json(nullptr);
  j["lpips"] = q.lpips ? json(*q.lpips) : json(nullptr);
  return j;
}

QualityReport quality_from(const json& j) {
  QualityReport q;
  q.mse = j.at("mse").get<double>();
  q.psnr = j.at("psnr").get<double>();
  q.ssim = j.at("ssim").get<double>();
  if (j.contains("vmaf") && !j["vmaf"].is_null()) q.vmaf = j["vmaf"].get<double>();
  if (j.contains("lpips") && !j["lpips"].is_null()) q.lpips = j["lpips"].get<double>();
  return q;
}

json to_json(const ExperimentRecord& r) {
  const ExperimentConfig& c = r.config;
  return json{
      {"id", r.id},
      {"config",
       {{"video", c.video}, {"block_size", c.block_size}, {"removed_fraction", c.removed_fraction},
        {"alpha", c.alpha}, {"beta", c.beta}, {"width", c.width}, {"height", c.height}, {"codec", c.codec},
        {"inpainter", c.inpainter}, {"mask_source", c.mask_source}, {"scene_threshold", c.scene_threshold},
        {"seed", c.seed}}},
      {"ok", r.ok},
      {"failed_stage", r.failed_stage},
      {"error", r.error},
      {"stage_seconds", r.stage_seconds},
      {"benchmark_seconds", r.benchmark_seconds},
      {"total_seconds", r.total_seconds},
      {"segments", r.segments},
      {"frames", r.frames},
      {"shrunk_encoded_bytes", r.shrunk_encoded_bytes},
      {"sidecar_bytes", r.sidecar_bytes},
      {"benchmark_bytes", r.benchmark_bytes},
      {"benchmark_q", r.benchmark_q},
      {"benchmark_size_matched", r.benchmark_size_matched},
      {"inpainted", quality_json(r.inpainted)},
      {"benchmark", quality_json(r.benchmark)},
      {"primary_metric", r.primary_metric},
      {"primary_inpainted", r.primary_inpainted},
      {"primary_benchmark", r.primary_benchmark},
      {"delivered", r.delivered},
  };
}

ExperimentRecord from_json(const json& j) {
  ExperimentRecord r;
  const json& c = j.at("config");
  r.config.video = c.at("video").get<std::string>();
  r.config.block_size = c.at("block_size").get<int>();
  r.config.removed_fraction = c.at("removed_fraction").get<double>();
  r.config.alpha = c.at("alpha").get<double>();
  r.config.beta = c.at("beta").get<double>();
  r.config.width = c.at("width").get<int>();
  r.config.height = c.at("height").get<int>();
  r.config.codec = c.at("codec").get<std::string>();
  r.config.inpainter = c.at("inpainter").get<std::string>();
  r.config.mask_source = c.at("mask_source").get<std::string>();
  r.config.scene_threshold = c.at("scene_threshold").get<double>();
  r.config.seed = c.at("seed").get<std::int64_t>();
  r.id = j.at("id").get<std::string>();
  r.ok = j.at("ok").get<bool>();
  r.failed_stage = j.at("failed_stage").get<std::string>();
  r.error = j.at("error").get<std::string>();
  r.stage_seconds = j.at("stage_seconds").get<std::map<std::string, double>>();
  r.benchmark_seconds = j.at("benchmark_seconds").get<double>();
  r.total_seconds = j.at("total_seconds").get<double>();
  r.segments = j.at("segments").get<int>();
  r.frames = j.at("frames").get<int>();
  r.shrunk_encoded_bytes = j.at("shrunk_encoded_bytes").get<std::uintmax_t>();
  r.sidecar_bytes = j.at("sidecar_bytes").get<std::uintmax_t>();
  r.benchmark_bytes = j.at("benchmark_bytes").get<std::uintmax_t>();
  r.benchmark_q = j.at("benchmark_q").get<int>();
  r.benchmark_size_matched = j.at("benchmark_size_matched").get<bool>();
  r.inpainted = quality_from(j.at("inpainted"));
  r.benchmark = quality_from(j.at("benchmark"));
  r.primary_metric = j.at("primary_metric").get<std::string>();
  r.primary_inpainted = j.at("primary_inpainted").get<double>();
  r.primary_benchmark = j.at("primary_benchmark").get<double>();
  r.delivered = j.at("delivered").get<std::string>();
  return r;
}

std::string read_file(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("cannot open " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& file, const std::string& text) {
  std::ofstream out(file);
  out << text;
  if (!out) throw Error("cannot write " + file.string());
}

}  // namespace

std::string record_to_json(const ExperimentRecord& r) { return to_json(r).dump(2); }

ExperimentRecord record_from_json(const std::string& text) { return from_json(json::parse(text)); }

void save_records(const std::vector<ExperimentRecord>& records, const fs::path& file) {
  json arr = json::array();
  for (const auto& r : records) arr.push_back(to_json(r));
  write_file(file, arr.dump(2));
}

std::vector<ExperimentRecord> load_records(const fs::path& file) {
  const json arr = json::parse(read_file(file));
  std::vector<ExperimentRecord> out;
  for (const auto& j : arr) out.push_back(from_json(j));
  return out;
}

// ---------------------------------------------------------------------------
// Sweep

std::vector<ExperimentRecord> sweep(const ExperimentGrid& grid, const PipelineSettings& settings,
                                    const SweepOptions& opt) {
  const auto configs = enumerate(grid, opt.budget);
  const fs::path artifacts = opt.out_dir / "artifacts";
  fs::create_directories(artifacts);
  std::vector<ExperimentRecord> records(configs.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;

  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < configs.size();) {
      const std::string id = configs[k].id();
      const fs::path saved = artifacts / id / "record.json";
      if (fs::exists(saved)) {
        try {
          ExperimentRecord r = record_from_json(read_file(saved));
          if (r.ok) {
            records[k] = std::move(r);
            continue;
          }
        } catch (const std::exception&) {
          // unreadable record: rerun
        }
      }
      ExperimentRecord r = run_experiment(configs[k], settings, artifacts);
      fs::create_directories(artifacts / id);
      write_file(saved, record_to_json(r));
      {
        std::lock_guard lock(log_mutex);
        std::clog << "[" << (k + 1) << "/" << configs.size() << "] " << id << " "
                  << (r.ok ? "ok" : "FAILED at " + r.failed_stage) << '\n';
      }
      records[k] = std::move(r);
    }
  };

  const int workers = std::max(1, std::min<int>(opt.workers, int(configs.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  save_records(records, opt.out_dir / "records.json");
  return records;
}

}  // namespace elvis
