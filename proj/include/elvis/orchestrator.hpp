#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "elvis/codec.hpp"
#include "elvis/config.hpp"
#include "elvis/inpaint.hpp"
#include "elvis/metrics.hpp"

namespace elvis {

// One point of the parameter grid.
struct ExperimentConfig {
  std::string video;
  int block_size = 16;
  double removed_fraction = 0.25;
  double alpha = 0.5;
  double beta = 0.5;
  int width = 0;   // 0 keeps the source size
  int height = 0;
  std::string codec = "null";             // "null" or a declared external codec name
  std::string inpainter = "temporal-copy";  // diffusion | temporal-copy | external
  std::string mask_source = "none";       // none | motion | mask directory ({video} = clip stem)
  double scene_threshold = 30.0;
  std::int64_t seed = 0;

  // Reals printed with 6 decimals so the string is platform-stable.
  std::string canonical() const;
  // 16 hex digits of FNV-1a over canonical().
  std::string id() const;
  std::string video_name() const;
};

// Settings shared by every experiment of a run or sweep.
struct PipelineSettings {
  std::map<std::string, ExternalCodec> codecs;
  // Codec for the size-matched benchmark when the experiment codec is "null";
  // empty means the benchmark is the lossless full-resolution encoding.
  std::string benchmark_codec;
  double size_tolerance = 0.05;
  std::string inpaint_command;  // external in-painter template
  DiffusionOptions diffusion;
  double motion_quantile = 0.75;
  double mask_coverage = 0.25;
  FrameRate frame_rate;
  std::string primary_metric = "psnr";  // psnr | ssim | mse | vmaf | lpips
  std::string vmaf_command, vmaf_json_path;
  std::string lpips_command, lpips_json_path;
  bool keep_artifacts = false;

  static PipelineSettings from(const KeyValues& kv);
};

inline constexpr std::array<const char*, 8> kStages = {"analyze", "select",  "shrink",  "encode",
                                                       "decode",  "stretch", "inpaint", "metrics"};

struct ExperimentRecord {
  ExperimentConfig config;
  std::string id;
  bool ok = false;
  std::string failed_stage;
  std::string error;

  std::map<std::string, double> stage_seconds;  // keyed by kStages
  double benchmark_seconds = 0.0;
  double total_seconds = 0.0;

  int segments = 0;
  int frames = 0;
  std::uintmax_t shrunk_encoded_bytes = 0;
  std::uintmax_t sidecar_bytes = 0;
  std::uintmax_t benchmark_bytes = 0;
  int benchmark_q = -1;
  bool benchmark_size_matched = false;

  QualityReport inpainted;
  QualityReport benchmark;
  std::string primary_metric;
  double primary_inpainted = 0.0;  // higher is better
  double primary_benchmark = 0.0;
  std::string delivered;  // "inpainted" | "benchmark"

  double sidecar_overhead() const {
    return shrunk_encoded_bytes ? double(sidecar_bytes) / double(shrunk_encoded_bytes) : 0.0;
  }
  double stage_sum() const;
};

// Higher-is-better score of a report under the named metric.
double primary_score(const QualityReport& q, const std::string& metric);

// Returns "benchmark" when the in-painted score is below the benchmark score.
std::string choose_delivery(double inpainted_score, double benchmark_score);

// Runs every stage for one configuration. Artifacts go to
// artifacts_root/<id>/. Stage failures are captured in the record.
ExperimentRecord run_experiment(const ExperimentConfig& config, const PipelineSettings& settings,
                                const std::filesystem::path& artifacts_root);

// Lists of values per parameter; enumerated as a Cartesian product.
struct ExperimentGrid {
  std::vector<std::string> videos;
  std::vector<int> block_sizes;
  std::vector<double> removed_fractions;
  std::vector<double> alphas;
  std::vector<double> betas;
  std::vector<std::pair<int, int>> resolutions;  // (width, height), paired
  std::vector<std::string> codecs;
  std::vector<std::string> inpainters;
  std::string mask_source = "none";
  double scene_threshold = 30.0;
  std::int64_t seed = 0;

  static ExperimentGrid from(const KeyValues& kv);
  std::size_t size() const;
};

// Keys understood by ExperimentGrid/PipelineSettings, for environment overrides.
std::vector<std::string> known_config_keys();

// Lexicographic order: video, block size, r, alpha, beta, resolution, codec,
// in-painter (last varies fastest). Truncated at budget.
std::vector<ExperimentConfig> enumerate(const ExperimentGrid& grid,
                                        std::size_t budget = std::size_t(-1));

struct SweepOptions {
  std::filesystem::path out_dir;
  std::size_t budget = std::size_t(-1);
  int workers = 1;
};

// Runs every enumerated configuration; completed experiment IDs found under
// out_dir/artifacts are loaded instead of rerun. Writes out_dir/records.json.
std::vector<ExperimentRecord> sweep(const ExperimentGrid& grid, const PipelineSettings& settings,
                                    const SweepOptions& options);

// JSON persistence, used for resumption and by `report`.
std::string record_to_json(const ExperimentRecord& record);
ExperimentRecord record_from_json(const std::string& json);
void save_records(const std::vector<ExperimentRecord>& records, const std::filesystem::path& file);
std::vector<ExperimentRecord> load_records(const std::filesystem::path& file);

// Writes records.csv, correlations.csv, improvement_by_video.csv and
// timings_by_video.csv into out_dir.
void report(const std::vector<ExperimentRecord>& records, const std::filesystem::path& out_dir);

// CSV field quoting per RFC 4180.
std::string csv_field(const std::string& s);

}  // namespace elvis
