// elvis: command-line front end for the individual pipeline stages and the
// experiment engine.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "elvis/analysis.hpp"
#include "elvis/codec.hpp"
#include "elvis/config.hpp"
#include "elvis/inpaint.hpp"
#include "elvis/media_io.hpp"
#include "elvis/metrics.hpp"
#include "elvis/orchestrator.hpp"
#include "elvis/resample.hpp"
#include "elvis/selection.hpp"
#include "elvis/sidecar.hpp"

namespace fs = std::filesystem;
using namespace elvis;

namespace {

struct Common {
  std::string config;
  std::vector<std::string> assignments;
};

KeyValues load_settings(const Common& c) {
  KeyValues kv = c.config.empty() ? KeyValues{} : KeyValues::load(c.config);
  kv.apply_environment(known_config_keys());
  for (const auto& a : c.assignments) kv.apply_assignment(a);
  return kv;
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config, "key = value settings file")->check(CLI::ExistingFile);
  app->add_option("-s,--set", c.assignments, "override a setting, key=value (repeatable)");
}

SequenceKind output_kind(const fs::path& out) {
  return out.extension() == ".y4m" ? SequenceKind::y4m_file : SequenceKind::png_directory;
}

void save(const FrameSequence& seq, const fs::path& out) {
  write_sequence(seq, out, output_kind(out));
}

SaliencyMask saliency_for(const FrameSequence& aligned, int b, const std::string& masks, bool motion,
                          double coverage, double q) {
  const BlockGeometry g = geometry_of(aligned, b);
  if (!masks.empty()) return load_masks(masks, g, coverage);
  if (motion) return motion_saliency(aligned, b, q);
  return empty_saliency(g.rows(), g.cols(), g.frame_count);
}

SidecarGeometry sidecar_geometry(const FrameSequence& aligned, int b) {
  return {aligned.original_width, aligned.original_height, b, aligned.size()};
}

// Stage inputs that share the same flags.
struct StageArgs {
  std::string input, output, sidecar, masks;
  int block = 16;
  bool motion = false;
};

void print_quality(const QualityReport& q) {
  nlohmann::json j{{"mse", q.mse}, {"psnr", q.psnr}, {"ssim", q.ssim}};
  if (q.vmaf) j["vmaf"] = *q.vmaf;
  if (q.lpips) j["lpips"] = *q.lpips;
  std::cout << j.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ELVIS block removal, sidecar and restoration pipeline"};
  app.require_subcommand(1);

  StageArgs a;
  Common common;
  double r = 0.25, alpha = 0.5, beta = 0.5;

  auto* analyze = app.add_subcommand("analyze", "Write spatial.csv and temporal.csv block complexity");
  analyze->add_option("input", a.input, "PNG directory or .y4m")->required();
  analyze->add_option("-o,--out", a.output, "output directory")->required();
  analyze->add_option("-b,--block", a.block, "block size")->check(CLI::IsMember({8, 16, 32, 64}));

  auto* select = app.add_subcommand("select", "Choose blocks to remove and write the sidecar");
  select->add_option("input", a.input)->required();
  select->add_option("-o,--out", a.sidecar, "sidecar file")->required();
  select->add_option("-b,--block", a.block)->check(CLI::IsMember({8, 16, 32, 64}));
  select->add_option("-r,--removed-fraction", r)->check(CLI::Range(0.0, 1.0));
  select->add_option("--alpha", alpha)->check(CLI::Range(0.0, 1.0));
  select->add_option("--beta", beta)->check(CLI::Range(0.0, 1.0));
  select->add_option("--masks", a.masks, "directory of per-frame foreground masks");
  select->add_flag("--motion", a.motion, "derive the saliency mask from temporal complexity");
  std::string plan_csv;
  select->add_option("--plan-csv", plan_csv, "also write the plan as CSV");

  auto* shrink = app.add_subcommand("shrink", "Remove the planned blocks");
  shrink->add_option("input", a.input)->required();
  shrink->add_option("--sidecar", a.sidecar)->required();
  shrink->add_option("-o,--out", a.output, "PNG directory or .y4m")->required();

  auto* stretch = app.add_subcommand("stretch", "Reinsert black placeholders at the planned blocks");
  stretch->add_option("input", a.input)->required();
  stretch->add_option("--sidecar", a.sidecar)->required();
  stretch->add_option("-o,--out", a.output)->required();

  std::string backend = "temporal-copy";
  auto* inpaint = app.add_subcommand("inpaint", "Fill placeholders of stretched frames");
  inpaint->add_option("input", a.input)->required();
  inpaint->add_option("--sidecar", a.sidecar)->required();
  inpaint->add_option("-o,--out", a.output)->required();
  inpaint->add_option("--backend", backend, "diffusion | temporal-copy | external");
  add_common(inpaint, common);

  std::string codec = "null";
  int quality = -1;
  auto* encode = app.add_subcommand("encode", "Encode with the null codec or a configured external codec");
  encode->add_option("input", a.input)->required();
  encode->add_option("-o,--out", a.output, "output directory")->required();
  encode->add_option("--codec", codec);
  encode->add_option("-q,--quality", quality, "quality parameter (external codecs)");
  add_common(encode, common);

  std::string ref, dist;
  auto* metrics = app.add_subcommand("metrics", "Compare two sequences");
  metrics->add_option("reference", ref)->required();
  metrics->add_option("distorted", dist)->required();
  add_common(metrics, common);

  std::string artifacts = "artifacts";
  auto* run = app.add_subcommand("run", "Run one experiment (first point of the configured grid)");
  add_common(run, common);
  run->add_option("-o,--out", artifacts, "artifacts directory");

  SweepOptions sweep_opts;
  sweep_opts.out_dir = "sweep";
  long budget = -1;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run the configured grid, resuming completed experiments");
  add_common(sweep_cmd, common);
  sweep_cmd->add_option("-o,--out", sweep_opts.out_dir);
  sweep_cmd->add_option("--budget", budget, "maximum number of experiments");
  sweep_cmd->add_option("-j,--workers", sweep_opts.workers)->check(CLI::PositiveNumber);
  bool with_report = false;
  sweep_cmd->add_flag("--report", with_report, "write the CSV report into the output directory");

  std::string records;
  auto* report_cmd = app.add_subcommand("report", "Write CSV summaries from records.json");
  report_cmd->add_option("records", records)->required()->check(CLI::ExistingFile);
  report_cmd->add_option("-o,--out", a.output)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) {
      const FrameSequence seq = align_to_blocks(load_sequence(a.input), a.block);
      const ComplexityTensors c = analyze_complexity(seq, a.block);
      fs::create_directories(a.output);
      write_tensor_csv(c.spatial, fs::path(a.output) / "spatial.csv");
      write_tensor_csv(c.temporal, fs::path(a.output) / "temporal.csv");
    } else if (*select) {
      const FrameSequence seq = align_to_blocks(load_sequence(a.input), a.block);
      const ComplexityTensors c = analyze_complexity(seq, a.block);
      const SaliencyMask m =
          saliency_for(seq, a.block, a.masks, a.motion, kDefaultMaskCoverage, kDefaultMotionQuantile);
      const RemovalPlan plan = select_blocks(c.spatial, c.temporal, m.m, {alpha, beta, r});
      const auto bytes = encode_sidecar(plan, sidecar_geometry(seq, a.block));
      write_sidecar_file(bytes, a.sidecar);
      if (!plan_csv.empty()) write_plan_csv(plan, plan_csv);
      std::cout << "k=" << plan.k() << " sidecar_bytes=" << bytes.size() << "\n";
    } else if (*shrink) {
      const DecodedSidecar sc = decode_sidecar(read_sidecar_file(a.sidecar));
      const FrameSequence seq = align_to_blocks(load_sequence(a.input), sc.geometry.block_size);
      if (seq.original_width != sc.geometry.original_width || seq.original_height != sc.geometry.original_height ||
          seq.size() != sc.geometry.frame_count)
        throw Error("input does not match the sidecar geometry");
      save(shrink_sequence(seq, sc.plan, sc.geometry.block_size), a.output);
    } else if (*stretch) {
      const DecodedSidecar sc = decode_sidecar(read_sidecar_file(a.sidecar));
      save(stretch_sequence(load_sequence(a.input), sc.plan, sc.geometry.block_size), a.output);
    } else if (*inpaint) {
      const KeyValues kv = load_settings(common);
      const PipelineSettings s = PipelineSettings::from(kv);
      const DecodedSidecar sc = decode_sidecar(read_sidecar_file(a.sidecar));
      InpaintRequest req{load_sequence(a.input), sc.plan.to_mask(), sc.geometry.block_size};
      req.frames.original_width = sc.geometry.original_width;
      req.frames.original_height = sc.geometry.original_height;
      FrameSequence out;
      switch (parse_inpaint_backend(backend)) {
        case InpaintBackend::diffusion: out = inpaint_diffusion(req, s.diffusion); break;
        case InpaintBackend::temporal_copy: out = inpaint_temporal_copy(req, s.diffusion); break;
        case InpaintBackend::external: {
          if (s.inpaint_command.empty()) throw Error("inpaint.external.command is not set");
          const fs::path work = fs::path(a.output).parent_path() / "inpaint_work";
          out = inpaint_external(req, {s.inpaint_command, work});
          fs::remove_all(work);
          break;
        }
      }
      save(crop_to_original(out), a.output);
    } else if (*encode) {
      const FrameSequence seq = load_sequence(a.input);
      EncodedArtifact art;
      if (codec == "null") {
        art = encode_null(seq, a.output);
      } else {
        const PipelineSettings s = PipelineSettings::from(load_settings(common));
        const auto it = s.codecs.find(codec);
        if (it == s.codecs.end()) throw Error("unknown codec: " + codec);
        fs::create_directories(a.output);
        art = encode_external(seq, it->second, quality >= 0 ? quality : it->second.default_quality(), a.output);
      }
      std::cout << art.payload_path.string() << " " << art.size << " bytes\n";
    } else if (*metrics) {
      const PipelineSettings s = PipelineSettings::from(load_settings(common));
      QualityReport q = measure_quality(load_sequence(ref), load_sequence(dist));
      if (!s.vmaf_command.empty()) q.vmaf = external_metric(s.vmaf_command, ref, dist, {s.vmaf_json_path});
      if (!s.lpips_command.empty()) q.lpips = external_metric(s.lpips_command, ref, dist, {s.lpips_json_path});
      print_quality(q);
    } else if (*run) {
      const KeyValues kv = load_settings(common);
      const auto configs = enumerate(ExperimentGrid::from(kv), 1);
      const ExperimentRecord rec = run_experiment(configs.front(), PipelineSettings::from(kv), artifacts);
      std::cout << record_to_json(rec) << "\n";
      return rec.ok ? 0 : 1;
    } else if (*sweep_cmd) {
      const KeyValues kv = load_settings(common);
      if (budget >= 0) sweep_opts.budget = std::size_t(budget);
      else if (kv.has("budget")) sweep_opts.budget = std::size_t(kv.get_int("budget", 0));
      if (kv.has("workers") && sweep_cmd->count("--workers") == 0) sweep_opts.workers = kv.get_int("workers", 1);
      const auto recs = sweep(ExperimentGrid::from(kv), PipelineSettings::from(kv), sweep_opts);
      std::size_t failed = 0;
      for (const auto& rec : recs) failed += !rec.ok;
      std::cout << recs.size() << " experiments, " << failed << " failed\n";
      if (with_report && !recs.empty()) report(recs, sweep_opts.out_dir);
    } else if (*report_cmd) {
      report(load_records(records), a.output);
    }
  } catch (const std::exception& e) {
    std::cerr << "elvis: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
