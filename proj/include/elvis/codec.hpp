#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "elvis/frame.hpp"
#include "elvis/media_io.hpp"

namespace elvis {

struct EncodedArtifact {
  std::filesystem::path payload_path;
  std::uintmax_t size = 0;  // bytes on disk
  std::string codec_id;     // "null" or "external:<name>"
  double encode_seconds = 0.0;
  int quality_param = -1;   // -1 for the null codec
};

// A subprocess encoder/decoder pair. The encode template sees {in} (a y4m
// file), {out} and {q}; the decode template sees {in} (the payload) and {out}
// (a y4m file to produce). Larger q means lower quality.
struct ExternalCodec {
  std::string name;
  std::string encode_command;
  std::string decode_command;
  int q_min = 0;
  int q_max = 51;
  int quality = -1;  // q used for the shrunk encoding; -1 = middle of the range
  Y4mColor input_color = Y4mColor::ycbcr420;
  std::string extension = ".bin";

  int default_quality() const { return quality >= 0 ? quality : (q_min + q_max) / 2; }
};

// Lossless PNG-directory container; size is the sum of the member files.
EncodedArtifact encode_null(const FrameSequence& seq, const std::filesystem::path& out_dir);
FrameSequence decode_null(const EncodedArtifact& artifact);

EncodedArtifact encode_external(const FrameSequence& seq, const ExternalCodec& codec, int quality_param,
                                const std::filesystem::path& workdir);
FrameSequence decode_external(const EncodedArtifact& artifact, const ExternalCodec& codec,
                              const std::filesystem::path& workdir);

struct SizeMatch {
  EncodedArtifact artifact;
  double ratio = 0.0;            // |size - target| / target
  bool within_tolerance = false;
  bool out_of_range = false;     // target outside [size(q_max), size(q_min)]
  int encodes = 0;
};

// Finds the quality parameter whose encoding best matches target_bytes.
// Probes q_min and q_max, then bisects assuming size is non-increasing in q.
SizeMatch match_size_benchmark(const FrameSequence& seq, std::uintmax_t target_bytes, double tolerance,
                               const ExternalCodec& codec, const std::filesystem::path& workdir);

}  // namespace elvis
