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

#include "mrfc/coarsening.hpp"
#include "mrfc/model.hpp"

namespace mrfc {

using FeatureArray = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Per-(node, label) features of one scale: strong-discontinuity flag, local
/// energy variation and unary coarsening residual.
struct FeatureMap {
  LabelMask psd;
  FeatureArray lev;
  FeatureArray uc;
  int scale = 0;
  bool normalized = false;

  int node_count() const { return static_cast<int>(lev.rows()); }
  int label_count() const { return static_cast<int>(lev.cols()); }
};

inline constexpr double kDefaultRhoFactor = 5.0;

struct DiscontinuityThreshold {
  double rho = 0.0;
  double rho_factor = kDefaultRhoFactor;
  double mean_edge_weight = 0.0;
};

/// Mean nominal edge weight of the model (0 without edges).
double mean_edge_weight(const Model& model);

DiscontinuityThreshold discontinuity_threshold(const Model& model, double rho_factor = kDefaultRhoFactor);

/// PSD(i, l) = 1 iff some incident edge costs more than rho at x. Constant in l.
///
/// The comparison carries a 1e-12 relative margin on rho so that equality
/// cases do not flip under positive rescaling of the potentials.
LabelMask compute_psd(const Model& model, const Solution& x, double rho);

/// LEV at scale s >= 1: unary and pairwise cost changes of moving node i to
/// label l, divided by the group size and the per-coarse-edge fine edge count
/// of the grouping that produced this scale.
FeatureArray compute_lev(const Model& model, const Solution& x, const GroupingFunction& g,
                         const EdgePartition& partition);

/// UC at scale s >= 1 from the finer model and the grouping that produced `coarse`.
FeatureArray compute_uc(const Model& coarse, const Model& fine, const GroupingFunction& g);

/// Divides lev and uc by the mean of their absolute values (skipped below 1e-12).
FeatureMap normalize(FeatureMap features);

/// Normalized feature map of scale s >= 1 of a pyramid at solution x.
FeatureMap compute_features(const Pyramid& pyramid, int scale, const Solution& x,
                            double rho_factor = kDefaultRhoFactor);

}  // namespace mrfc
