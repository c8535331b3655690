// Copyright 2026 The mrfc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <sstream>

#include "doctest.h"
#include "mrfc/bench.hpp"
#include "mrfc/error.hpp"
#include "support.hpp"

using namespace mrfc;
using namespace mrfc::testing;

namespace {

RunRecord record(Strategy s, double energy, double time_ms, Solution x, double lambda = kNoPruning) {
  RunRecord r;
  r.instance = "toy";
  r.strategy = s;
  r.lambda = lambda;
  r.result.x = std::move(x);
  r.result.energy.total = energy;
  r.time_ms = time_ms;
  return r;
}

std::vector<BenchmarkInstance> instances(int count) {
  std::vector<BenchmarkInstance> out;
  for (int k = 0; k < count; ++k) {
    SyntheticSpec spec;
    spec.seed = 300 + static_cast<std::uint64_t>(k);
    out.push_back({"syn" + std::to_string(k), generate_synthetic(spec).model});
  }
  return out;
}

}  // namespace

TEST_CASE("metrics against the direct baseline and the best run") {
  const std::vector<RunRecord> runs = {
      record(Strategy::direct, 10.0, 8.0, {0, 0, 0, 0}),
      record(Strategy::multiscale, 8.0, 4.0, {0, 1, 1, 1}),
      record(Strategy::pruning, 8.0, 2.0, {1, 1, 1, 1}, 10.0),
  };
  const auto m = compute_metrics(runs);
  REQUIRE(m.size() == 3);
  CHECK(m[0].energy_ratio == 1.0);
  CHECK(m[0].speedup == 1.0);
  CHECK(m[1].energy_ratio == 0.8);
  CHECK(m[1].speedup == 2.0);
  CHECK(m[2].speedup == 4.0);
  CHECK(m[2].lambda == 10.0);
  // The earliest of the tied best runs is the reference.
  CHECK(m[1].agreement == 1.0);
  CHECK(m[0].agreement == 0.25);
  CHECK(m[2].agreement == 0.75);
  // No trace means every label stayed active.
  CHECK(m[0].active_ratio == 1.0);
}

TEST_CASE("degenerate baselines are flagged, not divided") {
  auto m = compute_metrics({record(Strategy::direct, 0.0, 0.0, {0}), record(Strategy::multiscale, 1.0, 1.0, {0})});
  CHECK_FALSE(m[0].energy_ratio_valid);
  CHECK_FALSE(m[1].speedup_valid);
  CHECK(std::isnan(m[1].energy_ratio));
  BenchmarkReport report;
  report.rows = m;
  std::ostringstream csv;
  write_report_csv(report, csv);
  CHECK(csv.str().find("toy,multiscale,inf,1,nan,1,nan,1,1\n") != std::string::npos);
  CHECK(metrics_to_json(m[1]).at("speedup").is_null());

  CHECK_THROWS_AS(compute_metrics({record(Strategy::multiscale, 1.0, 1.0, {0})}), InvalidInput);
}

TEST_CASE("benchmark rows and their definitions") {
  BenchmarkConfig cfg;
  cfg.repeats = 2;
  const auto insts = instances(2);
  const BenchmarkReport report = run_benchmark(insts, cfg);
  REQUIRE(report.rows.size() == 6);
  REQUIRE(report.runs.size() == 6);
  for (size_t base = 0; base < 6; base += 3) {
    const RunMetrics& direct = report.rows[base];
    const RunMetrics& multi = report.rows[base + 1];
    const RunMetrics& unpruned = report.rows[base + 2];
    CHECK(direct.strategy == Strategy::direct);
    CHECK(direct.energy_ratio == 1.0);
    CHECK(direct.active_ratio == 1.0);
    CHECK(multi.active_ratio == 1.0);
    CHECK(multi.active_ratio_per_scale.size() == static_cast<size_t>(cfg.pipeline.num_scales));
    CHECK(unpruned.strategy == Strategy::pruning);
    CHECK(std::isinf(unpruned.lambda));
    CHECK(unpruned.energy == multi.energy);
    CHECK(report.runs[base + 2].result.x == report.runs[base + 1].result.x);
    double best = direct.energy;
    for (size_t k = base; k < base + 3; ++k) best = std::min(best, report.rows[k].energy);
    for (size_t k = base; k < base + 3; ++k) {
      CHECK(report.rows[k].energy == doctest::Approx(report.runs[k].result.energy.total));
      if (report.rows[k].energy == best) CHECK(report.rows[k].agreement == 1.0);
      CHECK(report.rows[k].time_ms > 0.0);
    }
  }
  CHECK(report.config.at("repeats") == 2);
  CHECK(report.config.at("lambdas").empty());

  const nlohmann::json j = report_to_json(report);
  CHECK(j.at("rows").size() == 6);
  CHECK(j.at("rows").at(1).at("trace").size() == static_cast<size_t>(cfg.pipeline.num_scales));
  CHECK(j.at("rows").at(2).at("lambda") == "inf");
}

TEST_CASE("benchmark output is deterministic apart from timing and thread count") {
  const auto insts = instances(3);
  BenchmarkConfig cfg;
  const BenchmarkReport a = run_benchmark(insts, cfg);
  cfg.jobs = 3;
  const BenchmarkReport b = run_benchmark(insts, cfg);
  REQUIRE(a.rows.size() == b.rows.size());
  for (size_t k = 0; k < a.rows.size(); ++k) {
    CHECK(a.rows[k].instance == b.rows[k].instance);
    CHECK(a.rows[k].energy == b.rows[k].energy);
    CHECK(a.rows[k].energy_ratio == b.rows[k].energy_ratio);
    CHECK(a.rows[k].agreement == b.rows[k].agreement);
    CHECK(a.runs[k].result.x == b.runs[k].result.x);
  }
}

TEST_CASE("timed runs keep the fastest repeat") {
  const auto insts = instances(1);
  PipelineConfig pc;
  const RunRecord r = timed_run("x", insts[0].model, pc, nullptr, 3);
  CHECK(r.time_ms > 0.0);
  CHECK(r.time_ms <= 1e3 * r.result.wall_time.count());
  CHECK(std::isinf(r.lambda));
}

TEST_CASE("CSV header") {
  BenchmarkReport empty;
  std::ostringstream os;
  write_report_csv(empty, os);
  CHECK(os.str() == "instance,strategy,lambda,energy,energy_ratio,time_ms,speedup,active_ratio,agreement\n");
}

TEST_CASE("lambda text") {
  CHECK(format_lambda(kNoPruning) == "inf");
  CHECK(format_lambda(10.0) == "10");
  CHECK(format_lambda(0.5) == "0.5");
  CHECK(std::isinf(parse_lambda("inf")));
  CHECK(std::isinf(parse_lambda("+inf")));
  CHECK(parse_lambda("100") == 100.0);
  CHECK(parse_lambda("1e-3") == 1e-3);
  for (const char* bad : {"", "0", "-1", "ten", "10x", "nan"}) CHECK_THROWS_AS(parse_lambda(bad), ConfigError);
  for (double v : {1.0, 10.0, 100.0, 0.25}) CHECK(parse_lambda(format_lambda(v)) == v);
}

TEST_CASE("active ratio image") {
  LabelMask mask = LabelMask::Constant(4, 4, true);
  mask.row(1).setConstant(false);
  mask(1, 2) = true;
  mask(2, 0) = false;
  mask(2, 1) = false;
  const GrayImage img = active_ratio_image(PruningMatrix(mask), GridShape{2, 2});
  CHECK(img.width == 2);
  CHECK(img.height == 2);
  CHECK(img.maxval == 255);
  CHECK(img.pixels == std::vector<std::uint16_t>{255, 64, 128, 255});
  CHECK_THROWS_AS(active_ratio_image(PruningMatrix(mask), GridShape{3, 2}), InvalidInput);
}
