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
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "mrfc/coarsening.hpp"
#include "mrfc/features.hpp"
#include "mrfc/model.hpp"

namespace mrfc {

/// Number of real features a classifier sees: (lev, uc).
inline constexpr int kFeatureDim = 2;
inline constexpr double kDefaultSvmC = 10.0;
inline constexpr double kNoPruning = std::numeric_limits<double>::infinity();

using FeatureVector = Eigen::Vector2d;

struct LinearClassifier {
  FeatureVector w = FeatureVector::Zero();
  double bias = 0.0;

  double margin(const FeatureVector& z) const { return w.dot(z) + bias; }
  /// Keep (true) iff the margin is >= 0.
  bool keep(const FeatureVector& z) const { return margin(z) >= 0.0; }

  static LinearClassifier always_keep() { return {FeatureVector::Zero(), 1.0}; }
};

struct GroupCounts {
  long c0 = 0;  // prunable samples
  long c1 = 0;  // samples that must be kept
};

struct ScaleClassifier {
  int scale = 0;
  LinearClassifier psd0;
  LinearClassifier psd1;
  std::array<GroupCounts, 2> counts{};
  /// Class c1 weight used per group (class c0 weight is 1).
  std::array<double, 2> weight_c1{1.0, 1.0};
  /// Group fell back to the constant keep classifier.
  std::array<bool, 2> fallback{false, false};
};

/// One pair of linear classifiers per scale s >= 1 plus training metadata.
struct CascadeModel {
  double lambda = 10.0;
  double C = kDefaultSvmC;
  std::map<int, ScaleClassifier> scales;

  const ScaleClassifier& at(int scale) const;
};

struct SvmOptions {
  double C = kDefaultSvmC;
  double weight_c0 = 1.0;
  double weight_c1 = 1.0;
  /// Newton steps per smoothing level.
  int max_newton_steps = 100;
  /// Smallest width of the quadratic zone of the smoothed hinge.
  double smoothing_floor = 1e-8;
  /// Gradient infinity-norm tolerance, relative to 1 + sum of sample costs.
  double tolerance = 1e-9;
};

/// Minimizes 1/2 |w|^2 + C sum_k omega_k hinge(y_k (w.z_k + b)), bias not
/// regularized, by damped Newton on a smoothed hinge whose quadratic zone
/// shrinks geometrically. Returns the iterate with the lowest exact objective.
/// targets: 1 = keep.
LinearClassifier train_weighted_linear_svm(const std::vector<FeatureVector>& samples,
                                           const std::vector<std::uint8_t>& targets,
                                           const SvmOptions& options);

/// Unweighted hinge loss summed over the samples.
double hinge_loss(const LinearClassifier& clf, const std::vector<FeatureVector>& samples,
                  const std::vector<std::uint8_t>& targets);

/// Picks the PSD group's classifier; true means keep.
bool predict(const ScaleClassifier& sc, bool psd, double lev, double uc);

/// A(i, l) = f(z(g(i), l)) over the finer scale, then the warm-start label of
/// every node is re-activated so that `warm_start` stays feasible.
PruningMatrix build_pruning_matrix(const ScaleClassifier& sc, const FeatureMap& features,
                                   const GroupingFunction& g, const Solution& warm_start);

nlohmann::json cascade_to_json(const CascadeModel& cascade);
CascadeModel cascade_from_json(const nlohmann::json& j);

void save_cascade(const CascadeModel& cascade, const std::filesystem::path& path);
CascadeModel load_cascade(const std::filesystem::path& path);

}  // namespace mrfc
