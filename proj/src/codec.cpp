#include "elvis/codec.hpp"

#include <chrono>
#include <cmath>
#include <optional>

#include "elvis/error.hpp"
#include "elvis/subprocess.hpp"

namespace fs = std::filesystem;

namespace elvis {

EncodedArtifact encode_null(const FrameSequence& seq, const fs::path& out_dir) {
  if (seq.empty()) throw Error("no frames");
  const auto start = std::chrono::steady_clock::now();
  fs::remove_all(out_dir);
  EncodedArtifact a;
  a.size = write_sequence(seq, out_dir, SequenceKind::png_directory);
  a.encode_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  a.payload_path = out_dir;
  a.codec_id = "null";
  return a;
}

FrameSequence decode_null(const EncodedArtifact& a) {
  return load_sequence(a.payload_path, SequenceKind::png_directory);
}

EncodedArtifact encode_external(const FrameSequence& seq, const ExternalCodec& codec, int q,
                                const fs::path& workdir) {
  if (seq.empty()) throw Error("no frames");
  fs::create_directories(workdir);
  const fs::path input = workdir / (codec.name + "_input.y4m");
  write_sequence(seq, input, SequenceKind::y4m_file, codec.input_color);
  const fs::path out = workdir / (codec.name + "_q" + std::to_string(q) + codec.extension);
  fs::remove(out);
  const auto r = run_checked(
      expand_template(codec.encode_command, {{"in", input.string()}, {"out", out.string()}, {"q", std::to_string(q)}}),
      "encoder " + codec.name);
  fs::remove(input);
  if (!fs::exists(out)) throw Error("encoder " + codec.name + " produced no output at " + out.string());
  EncodedArtifact a;
  a.payload_path = out;
  a.size = fs::file_size(out);
  a.codec_id = "external:" + codec.name;
  a.encode_seconds = r.seconds;
  a.quality_param = q;
  return a;
}

FrameSequence decode_external(const EncodedArtifact& a, const ExternalCodec& codec, const fs::path& workdir) {
  fs::create_directories(workdir);
  const fs::path out = workdir / (a.payload_path.stem().string() + "_decoded.y4m");
  fs::remove(out);
  run_checked(expand_template(codec.decode_command, {{"in", a.payload_path.string()}, {"out", out.string()}}),
              "decoder " + codec.name);
  if (!fs::exists(out)) throw Error("decoder " + codec.name + " produced no output");
  FrameSequence seq = load_sequence(out, SequenceKind::y4m_file);
  fs::remove(out);
  return seq;
}

SizeMatch match_size_benchmark(const FrameSequence& seq, std::uintmax_t target, double tolerance,
                               const ExternalCodec& codec, const fs::path& workdir) {
  if (target == 0) throw Error("benchmark target size must be positive");
  if (codec.q_min > codec.q_max) throw Error("empty quality parameter range");
  SizeMatch best;
  std::optional<double> best_ratio;
  int encodes = 0;
  auto probe = [&](int q) {
    EncodedArtifact a = encode_external(seq, codec, q, workdir);
    ++encodes;
    const double ratio = std::abs(double(a.size) - double(target)) / double(target);
    if (!best_ratio || ratio < *best_ratio) {
      if (best_ratio && best.artifact.payload_path != a.payload_path) fs::remove(best.artifact.payload_path);
      best.artifact = a;
      best.ratio = ratio;
      best_ratio = ratio;
    } else {
      fs::remove(a.payload_path);
    }
    return std::pair{a.size, ratio <= tolerance};
  };
  auto finish = [&](bool out_of_range) {
    best.within_tolerance = best.ratio <= tolerance;
    best.out_of_range = out_of_range;
    best.encodes = encodes;
    return best;
  };

  int lo = codec.q_min, hi = codec.q_max;
  const auto [lo_size, lo_ok] = probe(lo);
  if (lo_ok) return finish(false);
  if (lo_size < target) return finish(true);  // even the best quality undershoots
  if (hi == lo) return finish(true);
  const auto [hi_size, hi_ok] = probe(hi);
  if (hi_ok) return finish(false);
  if (hi_size > target) return finish(true);  // even the worst quality overshoots
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    const auto [size, ok] = probe(mid);
    if (ok) return finish(false);
    if (size > target) lo = mid;
    else hi = mid;
  }
  return finish(false);
}

}  // namespace elvis
