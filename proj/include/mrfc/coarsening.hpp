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

#include <optional>
#include <vector>

#include "mrfc/model.hpp"

namespace mrfc {

/// Surjective map from fine nodes onto [0, coarse_count).
class GroupingFunction {
 public:
  explicit GroupingFunction(std::vector<int> parent, std::optional<GridShape> coarse_grid = std::nullopt);

  int fine_count() const { return static_cast<int>(parent_.size()); }
  int coarse_count() const { return static_cast<int>(children_.size()); }
  int parent(int fine) const { return parent_[fine]; }
  const std::vector<int>& parents() const { return parent_; }
  const std::vector<int>& children(int coarse) const { return children_[coarse]; }
  /// N_V: number of fine nodes merged into `coarse`.
  int group_size(int coarse) const { return static_cast<int>(children_[coarse].size()); }
  const std::optional<GridShape>& coarse_grid() const { return coarse_grid_; }

  static GroupingFunction identity(int node_count);

 private:
  std::vector<int> parent_;
  std::vector<std::vector<int>> children_;
  std::optional<GridShape> coarse_grid_;
};

/// Fine node (r, c) goes to coarse node (r/2, c/2).
GroupingFunction grid_grouping_2x2(GridShape shape);

/// How the fine edges of a model distribute over a grouping.
struct EdgePartition {
  /// Coarse edges (i' < j'), sorted lexicographically.
  std::vector<std::pair<int, int>> coarse_edges;
  /// For every coarse edge, the fine edge indices crossing it.
  std::vector<std::vector<int>> crossing;
  /// For every coarse node, the fine edge indices internal to its group.
  std::vector<std::vector<int>> intra;

  /// N_E: fine edges merged into coarse edge e.
  int crossing_count(int e) const { return static_cast<int>(crossing[e].size()); }
};

EdgePartition partition_edges(const Model& model, const GroupingFunction& g);

/// Coarser model: summed member unaries plus intra-group diagonal costs, and
/// coarse pairwise terms summing every crossing fine potential. Parametric
/// potentials sharing one kernel stay parametric with summed weights; any
/// other mix becomes a dense table.
Model coarsen(const Model& model, const GroupingFunction& g);
Model coarsen(const Model& model, const GroupingFunction& g, const EdgePartition& partition);

/// x_i = x'_{g(i)}.
Solution upsample(const Solution& coarse, const GroupingFunction& g);

/// M(0) = input, M(s+1) = coarsen(M(s), g(s)).
struct Pyramid {
  std::vector<Model> models;
  std::vector<GroupingFunction> groupings;   // groupings[s] maps scale s onto s+1
  std::vector<EdgePartition> partitions;     // partitions[s] of models[s] under groupings[s]

  int depth() const { return static_cast<int>(models.size()); }
  int coarsest() const { return depth() - 1; }
};

/// Grid pyramid with 2x2 grouping; num_scales caps the depth and
/// construction stops once a 1x1 grid is reached.
Pyramid build_pyramid(const Model& model, int num_scales);

/// Pyramid from caller-supplied groupings (any topology).
Pyramid build_pyramid(const Model& model, const std::vector<GroupingFunction>& groupings);

}  // namespace mrfc
