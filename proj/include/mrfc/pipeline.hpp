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

#include <array>
#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mrfc/classifier.hpp"
#include "mrfc/coarsening.hpp"
#include "mrfc/features.hpp"
#include "mrfc/model.hpp"
#include "mrfc/solvers.hpp"

namespace mrfc {

enum class Strategy : std::uint8_t { direct, multiscale, pruning };

const char* strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);

inline constexpr int kDefaultScales = 5;

struct PipelineConfig {
  int num_scales = kDefaultScales;
  Strategy strategy = Strategy::multiscale;
  /// Pruning aggressiveness the cascade was trained with; infinity disables pruning.
  double lambda = 10.0;
  double rho_factor = kDefaultRhoFactor;
  SolverConfig solver;
  /// Direct strategy starting point; unary argmin when empty.
  std::optional<Solution> direct_init;
  /// Explicit groupings for non-grid models; the 2x2 grid grouping otherwise.
  std::vector<GroupingFunction> groupings;
  /// Keep every scale's start and result labeling in the trace.
  bool record_solutions = false;
};

struct ScaleRecord {
  int scale = 0;
  int node_count = 0;
  double energy_before = 0.0;
  double energy_after = 0.0;
  long active_labels = 0;
  double active_ratio = 1.0;
  std::chrono::duration<double> solve_time{0.0};
  int solver_iterations = 0;
  /// Filled only with PipelineConfig::record_solutions.
  Solution initial;
  Solution solution;
};

/// Scale records from coarsest to finest.
using ScaleTrace = std::vector<ScaleRecord>;

struct PipelineResult {
  Solution x;
  Energy energy;
  ScaleTrace trace;
  /// Pruning matrix applied at each scale.
  std::map<int, PruningMatrix> pruning;
  std::chrono::duration<double> wall_time{0.0};

  double active_label_ratio() const { return trace.empty() ? 1.0 : trace.back().active_ratio; }
};

/// Coarse-to-fine MAP estimation. For the pruning strategy a cascade covering
/// every scale >= 1 of the pyramid is required unless lambda is infinite.
PipelineResult run(const Model& model, const PipelineConfig& cfg, const CascadeModel* cascade = nullptr);

/// Per-scale ground-truth keep masks: one-hot at scale 0, group-wise OR above.
using XMapPyramid = std::vector<LabelMask>;

XMapPyramid build_xmap_pyramid(const Solution& ground_truth, const Pyramid& pyramid);

struct TrainingSample {
  double lev = 0.0;
  double uc = 0.0;
  std::uint8_t target = 0;
  int node = 0;
  int label = 0;
};

struct TrainingSet {
  /// samples[scale][psd group]
  std::map<int, std::array<std::vector<TrainingSample>, 2>> samples;

  std::size_t size() const;
  GroupCounts counts(int scale, int group) const;
};

struct TrainingInstance {
  Model model;
  Solution ground_truth;
};

/// Unpruned multiscale runs recording normalized features and X_MAP targets
/// at every scale >= 1.
TrainingSet collect_training_data(const std::vector<TrainingInstance>& instances, const PipelineConfig& cfg);

void write_training_csv(const TrainingSet& set, std::ostream& out);

/// Per scale and PSD group: weighted SVM with omega_c0 = 1 and
/// omega_c1 = lambda card(c0) / card(c1). Single-class groups get the
/// constant keep classifier and are flagged.
CascadeModel train_cascade(const TrainingSet& training, double lambda, double C = kDefaultSvmC);

}  // namespace mrfc
