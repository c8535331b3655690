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

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "mrfc/classifier.hpp"
#include "mrfc/pipeline.hpp"
#include "mrfc/problems.hpp"

namespace mrfc {

/// One strategy run on one instance.
struct RunRecord {
  std::string instance;
  Strategy strategy = Strategy::direct;
  /// Infinity for direct, multiscale and unpruned pruning runs.
  double lambda = kNoPruning;
  PipelineResult result;
  /// Fastest of the repeated runs, milliseconds.
  double time_ms = 0.0;
};

struct RunMetrics {
  std::string instance;
  Strategy strategy = Strategy::direct;
  double lambda = kNoPruning;
  double energy = 0.0;
  double energy_ratio = 1.0;
  double time_ms = 0.0;
  double speedup = 1.0;
  double active_ratio = 1.0;
  /// Active ratio per scale, coarsest first.
  std::vector<double> active_ratio_per_scale;
  double agreement = 1.0;
  bool energy_ratio_valid = true;
  bool speedup_valid = true;
};

/// Metrics of every run of a single instance against its direct baseline
/// and against whichever run reached the lowest energy.
std::vector<RunMetrics> compute_metrics(const std::vector<RunRecord>& runs);

struct BenchmarkInstance {
  std::string name;
  Model model;
};

struct BenchmarkConfig {
  PipelineConfig pipeline;
  std::vector<CascadeModel> cascades;
  /// Adds a pruning row with lambda = +inf (no pruning).
  bool include_unpruned = true;
  int repeats = 1;
  int jobs = 1;
};

struct BenchmarkReport {
  std::vector<RunMetrics> rows;
  /// Raw runs in row order, kept for label-level comparisons.
  std::vector<RunRecord> runs;
  nlohmann::json config;
};

/// Runs direct, multiscale and pruning (one per cascade, plus lambda = +inf)
/// on every instance. `jobs` > 1 processes instances concurrently.
BenchmarkReport run_benchmark(const std::vector<BenchmarkInstance>& instances, const BenchmarkConfig& cfg);

/// Runs one strategy `repeats` times and keeps the fastest timing.
RunRecord timed_run(const std::string& instance, const Model& model, const PipelineConfig& cfg,
                    const CascadeModel* cascade, int repeats);

inline constexpr const char* kReportCsvHeader =
    "instance,strategy,lambda,energy,energy_ratio,time_ms,speedup,active_ratio,agreement";

void write_report_csv(const BenchmarkReport& report, std::ostream& out);
nlohmann::json report_to_json(const BenchmarkReport& report);

nlohmann::json metrics_to_json(const RunMetrics& m);
nlohmann::json trace_to_json(const ScaleTrace& trace);
std::string format_lambda(double lambda);
double parse_lambda(const std::string& text);

/// Per-vertex percentage of active labels: 0 = black = 0 %, 255 = 100 %.
GrayImage active_ratio_image(const PruningMatrix& a, GridShape shape);

}  // namespace mrfc
