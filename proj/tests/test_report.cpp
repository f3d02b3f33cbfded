#include <doctest.h>

#include <fstream>
#include <map>

#include "elvis/error.hpp"
#include "elvis/orchestrator.hpp"
#include "support.hpp"

using namespace elvis;
using namespace elvis::test;

namespace {

// Minimal RFC 4180 reader: quoted fields, doubled quotes, embedded commas.
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  REQUIRE(in);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (char c; in.get(c);) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') field += char(in.get());
        else quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(field);
      field.clear();
    } else if (c == '\n') {
      row.push_back(field);
      rows.push_back(row);
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
    }
  }
  REQUIRE_FALSE(quoted);
  if (any) row.push_back(field), rows.push_back(row);
  return rows;
}

std::map<std::string, std::string> as_map(const std::vector<std::string>& header, const std::vector<std::string>& row) {
  std::map<std::string, std::string> m;
  for (std::size_t k = 0; k < header.size(); ++k) m[header[k]] = row.at(k);
  return m;
}

ExperimentRecord fake_record(const std::string& video, double r, double in_psnr, double bench_psnr) {
  ExperimentRecord rec;
  rec.config.video = video;
  rec.config.removed_fraction = r;
  rec.id = rec.config.id();
  rec.ok = true;
  for (const char* s : kStages) rec.stage_seconds[s] = 0.01;
  rec.total_seconds = 0.5;
  rec.inpainted.psnr = in_psnr;
  rec.inpainted.mse = 10;
  rec.inpainted.ssim = 0.9;
  rec.benchmark.psnr = bench_psnr;
  rec.benchmark.mse = 12;
  rec.benchmark.ssim = 0.8;
  rec.primary_metric = "psnr";
  rec.primary_inpainted = in_psnr;
  rec.primary_benchmark = bench_psnr;
  rec.delivered = choose_delivery(in_psnr, bench_psnr);
  return rec;
}

}  // namespace

TEST_CASE("csv quoting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("two\nlines") == "\"two\nlines\"");
}

TEST_CASE("report needs records") {
  TempDir dir;
  CHECK_THROWS_AS(report({}, dir.path()), Error);
}

TEST_CASE("a single record only yields skip notes") {
  TempDir dir;
  report({fake_record("a.y4m", 0.25, 30, 29)}, dir.path());
  const auto rows = read_csv(dir / "correlations.csv");
  REQUIRE(rows.size() > 1);
  CHECK(rows[0] == std::vector<std::string>{"parameter", "target", "pearson", "n", "note"});
  for (std::size_t k = 1; k < rows.size(); ++k) {
    CHECK(rows[k][2].empty());
    CHECK(rows[k][4].rfind("skipped", 0) == 0);
  }
}

TEST_CASE("constructed linearity gives a unit correlation") {
  TempDir dir;
  std::vector<ExperimentRecord> recs;
  for (double r : {0.1, 0.25, 0.5, 0.75}) recs.push_back(fake_record("a.y4m", r, 2 * r, 0.0));
  report(recs, dir.path());
  const auto rows = read_csv(dir / "correlations.csv");
  bool found = false;
  for (const auto& row : rows)
    if (row[0] == "removed_fraction" && row[1] == "inpainted_psnr") {
      found = true;
      CHECK(std::stod(row[2]) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(row[3] == "4");
    } else if (row[0] == "block_size") {
      CHECK(row[4] == "skipped: constant parameter");
    }
  CHECK(found);
}

TEST_CASE("improvement rows agree with records.csv") {
  TempDir dir;
  std::vector<ExperimentRecord> recs{fake_record("clips/a.y4m", 0.1, 30, 28), fake_record("clips/a.y4m", 0.5, 25, 27),
                                     fake_record("clips/b.y4m", 0.25, 33, 30)};
  ExperimentRecord failed = fake_record("clips/b.y4m", 0.5, 0, 0);
  failed.ok = false;
  failed.failed_stage = "encode";
  failed.error = "encoder x exited with status 1, \"bad\"";
  recs.push_back(failed);
  report(recs, dir.path());

  const auto records = read_csv(dir / "records.csv");
  REQUIRE(records.size() == 5);
  const auto& header = records[0];
  std::map<std::string, std::vector<double>> diffs;
  for (std::size_t k = 1; k < records.size(); ++k) {
    REQUIRE(records[k].size() == header.size());
    auto m = as_map(header, records[k]);
    if (m["status"] != "ok") {
      CHECK(m["error"] == failed.error);
      continue;
    }
    diffs[m["video_name"]].push_back(std::stod(m["inpainted_psnr"]) - std::stod(m["benchmark_psnr"]));
    CHECK(m["delivered"] == (std::stod(m["inpainted_psnr"]) < std::stod(m["benchmark_psnr"]) ? "benchmark" : "inpainted"));
  }

  const auto imp = read_csv(dir / "improvement_by_video.csv");
  CHECK(imp[0] == std::vector<std::string>{"video", "metric", "mean_improvement", "max_improvement", "experiments"});
  int checked = 0;
  for (std::size_t k = 1; k < imp.size(); ++k) {
    if (imp[k][1] != "psnr") continue;
    const auto& d = diffs.at(imp[k][0]);
    double sum = 0, mx = d.front();
    for (double v : d) sum += v, mx = std::max(mx, v);
    CHECK(std::stod(imp[k][2]) == doctest::Approx(sum / d.size()));
    CHECK(std::stod(imp[k][3]) == doctest::Approx(mx));
    CHECK(imp[k][4] == std::to_string(d.size()));
    ++checked;
  }
  CHECK(checked == 2);

  const auto timings = read_csv(dir / "timings_by_video.csv");
  CHECK(timings.size() == 1 + 2 * (kStages.size() + 2));
}
