#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "elvis/error.hpp"
#include "elvis/metrics.hpp"
#include "elvis/orchestrator.hpp"

namespace fs = std::filesystem;

namespace elvis {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

namespace {

std::string num(double v) {
  std::ostringstream out;
  out.precision(10);
  out << v;
  return out.str();
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : ""; }

class CsvWriter {
 public:
  explicit CsvWriter(const fs::path& file) : out_(file), file_(file) {
    if (!out_) throw Error("cannot write " + file.string());
  }
  void row(const std::vector<std::string>& fields) {
    for (std::size_t k = 0; k < fields.size(); ++k) out_ << (k ? "," : "") << csv_field(fields[k]);
    out_ << '\n';
  }
  ~CsvWriter() { out_.flush(); }

 private:
  std::ofstream out_;
  fs::path file_;
};

struct Column {
  std::string name;
  std::function<std::optional<double>(const ExperimentRecord&)> get;
};

std::vector<Column> parameter_columns() {
  return {
      {"block_size", [](const ExperimentRecord& r) { return std::optional<double>(r.config.block_size); }},
      {"removed_fraction", [](const ExperimentRecord& r) { return std::optional<double>(r.config.removed_fraction); }},
      {"alpha", [](const ExperimentRecord& r) { return std::optional<double>(r.config.alpha); }},
      {"beta", [](const ExperimentRecord& r) { return std::optional<double>(r.config.beta); }},
      {"width", [](const ExperimentRecord& r) { return std::optional<double>(r.config.width); }},
      {"height", [](const ExperimentRecord& r) { return std::optional<double>(r.config.height); }},
  };
}

// Metric name -> accessor, shared by the correlation and improvement tables.
std::vector<std::pair<std::string, std::function<std::optional<double>(const QualityReport&)>>> metric_accessors() {
  return {
      {"mse", [](const QualityReport& q) { return std::optional<double>(q.mse); }},
      {"psnr", [](const QualityReport& q) { return std::optional<double>(q.psnr); }},
      {"ssim", [](const QualityReport& q) { return std::optional<double>(q.ssim); }},
      {"vmaf", [](const QualityReport& q) { return q.vmaf; }},
      {"lpips", [](const QualityReport& q) { return q.lpips; }},
  };
}

std::vector<Column> target_columns() {
  std::vector<Column> cols;
  for (const auto& [name, get] : metric_accessors()) {
    cols.push_back({"inpainted_" + name, [get](const ExperimentRecord& r) { return get(r.inpainted); }});
    cols.push_back({"improvement_" + name, [get](const ExperimentRecord& r) -> std::optional<double> {
                      const auto a = get(r.inpainted), b = get(r.benchmark);
                      if (!a || !b) return std::nullopt;
                      return *a - *b;
                    }});
  }
  cols.push_back({"encode_seconds", [](const ExperimentRecord& r) { return std::optional<double>(r.stage_seconds.at("encode")); }});
  cols.push_back({"inpaint_seconds", [](const ExperimentRecord& r) { return std::optional<double>(r.stage_seconds.at("inpaint")); }});
  return cols;
}

bool constant(const std::vector<double>& v) {
  for (double x : v)
    if (x != v.front()) return false;
  return true;
}

void write_records_csv(const std::vector<ExperimentRecord>& records, const fs::path& file) {
  CsvWriter csv(file);
  std::vector<std::string> header{"id", "video", "video_name", "block_size", "removed_fraction", "alpha", "beta",
                                  "width", "height", "codec", "inpainter", "mask_source", "scene_threshold", "seed",
                                  "status", "failed_stage", "error", "segments", "frames"};
  for (const char* s : kStages) header.push_back(std::string("t_") + s);
  for (const char* h : {"t_benchmark", "t_total", "shrunk_encoded_bytes", "sidecar_bytes", "benchmark_bytes",
                        "benchmark_q", "benchmark_size_matched", "sidecar_overhead"})
    header.push_back(h);
  for (const char* side : {"inpainted", "benchmark"})
    for (const auto& [name, get] : metric_accessors()) header.push_back(std::string(side) + "_" + name);
  for (const char* h : {"primary_metric", "primary_inpainted", "primary_benchmark", "delivered"}) header.push_back(h);
  csv.row(header);

  for (const auto& r : records) {
    const auto& c = r.config;
    std::vector<std::string> row{r.id, c.video, c.video_name(), std::to_string(c.block_size), num(c.removed_fraction),
                                 num(c.alpha), num(c.beta), std::to_string(c.width), std::to_string(c.height),
                                 c.codec, c.inpainter, c.mask_source, num(c.scene_threshold), std::to_string(c.seed),
                                 r.ok ? "ok" : "failed", r.failed_stage, r.error, std::to_string(r.segments),
                                 std::to_string(r.frames)};
    for (const char* s : kStages) {
      const auto it = r.stage_seconds.find(s);
      row.push_back(num(it == r.stage_seconds.end() ? 0.0 : it->second));
    }
    row.insert(row.end(), {num(r.benchmark_seconds), num(r.total_seconds), std::to_string(r.shrunk_encoded_bytes),
                           std::to_string(r.sidecar_bytes), std::to_string(r.benchmark_bytes),
                           std::to_string(r.benchmark_q), r.benchmark_size_matched ? "1" : "0",
                           num(r.sidecar_overhead())});
    for (const QualityReport* q : {&r.inpainted, &r.benchmark})
      for (const auto& [name, get] : metric_accessors()) row.push_back(r.ok ? opt_num(get(*q)) : "");
    row.insert(row.end(), {r.primary_metric, r.ok ? num(r.primary_inpainted) : "",
                           r.ok ? num(r.primary_benchmark) : "", r.delivered});
    csv.row(row);
  }
}

void write_correlations(const std::vector<const ExperimentRecord*>& ok, const fs::path& file) {
  CsvWriter csv(file);
  csv.row({"parameter", "target", "pearson", "n", "note"});
  for (const auto& p : parameter_columns()) {
    for (const auto& t : target_columns()) {
      std::vector<double> xs, ys;
      for (const auto* r : ok) {
        const auto x = p.get(*r), y = t.get(*r);
        if (x && y) xs.push_back(*x), ys.push_back(*y);
      }
      const std::string n = std::to_string(xs.size());
      if (xs.empty()) continue;  // metric not measured
      if (xs.size() < 2) csv.row({p.name, t.name, "", n, "skipped: fewer than two records"});
      else if (constant(xs)) csv.row({p.name, t.name, "", n, "skipped: constant parameter"});
      else if (constant(ys)) csv.row({p.name, t.name, "", n, "skipped: constant target"});
      else csv.row({p.name, t.name, num(pearson(xs, ys)), n, ""});
    }
  }
}

void write_improvements(const std::vector<const ExperimentRecord*>& ok, const fs::path& file) {
  CsvWriter csv(file);
  csv.row({"video", "metric", "mean_improvement", "max_improvement", "experiments"});
  std::map<std::string, std::vector<const ExperimentRecord*>> by_video;
  for (const auto* r : ok) by_video[r->config.video_name()].push_back(r);
  for (const auto& [video, recs] : by_video) {
    for (const auto& [name, get] : metric_accessors()) {
      std::vector<double> diffs;
      for (const auto* r : recs) {
        const auto a = get(r->inpainted), b = get(r->benchmark);
        if (a && b) diffs.push_back(*a - *b);
      }
      if (diffs.empty()) continue;
      double sum = 0, mx = diffs.front();
      for (double d : diffs) sum += d, mx = std::max(mx, d);
      csv.row({video, name, num(sum / diffs.size()), num(mx), std::to_string(diffs.size())});
    }
  }
}

void write_timings(const std::vector<const ExperimentRecord*>& ok, const fs::path& file) {
  CsvWriter csv(file);
  csv.row({"video", "stage", "mean_seconds", "max_seconds", "total_seconds", "experiments"});
  std::map<std::string, std::vector<const ExperimentRecord*>> by_video;
  for (const auto* r : ok) by_video[r->config.video_name()].push_back(r);
  std::vector<std::string> stages(kStages.begin(), kStages.end());
  stages.push_back("benchmark");
  stages.push_back("total");
  for (const auto& [video, recs] : by_video) {
    for (const auto& stage : stages) {
      double sum = 0, mx = 0;
      for (const auto* r : recs) {
        const double t = stage == "benchmark" ? r->benchmark_seconds
                         : stage == "total"   ? r->total_seconds
                                              : r->stage_seconds.at(stage);
        sum += t;
        mx = std::max(mx, t);
      }
      csv.row({video, stage, num(sum / recs.size()), num(mx), num(sum), std::to_string(recs.size())});
    }
  }
}

}  // namespace

void report(const std::vector<ExperimentRecord>& records, const fs::path& out_dir) {
  if (records.empty()) throw Error("report needs at least one record");
  fs::create_directories(out_dir);
  std::vector<const ExperimentRecord*> ok;
  for (const auto& r : records)
    if (r.ok) ok.push_back(&r);
  write_records_csv(records, out_dir / "records.csv");
  write_correlations(ok, out_dir / "correlations.csv");
  write_improvements(ok, out_dir / "improvement_by_video.csv");
  write_timings(ok, out_dir / "timings_by_video.csv");
}

}  // namespace elvis
