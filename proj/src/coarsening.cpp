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

#include "mrfc/coarsening.hpp"

#include <algorithm>
#include <string>

#include "mrfc/error.hpp"

namespace mrfc {

GroupingFunction::GroupingFunction(std::vector<int> parent, std::optional<GridShape> coarse_grid)
    : parent_(std::move(parent)), coarse_grid_(coarse_grid) {
  if (parent_.empty()) throw InvalidInput("grouping must cover at least one node");
  int coarse = 0;
  for (int p : parent_) {
    if (p < 0) throw InvalidInput("grouping maps a node to a negative index");
    coarse = std::max(coarse, p + 1);
  }
  children_.resize(static_cast<size_t>(coarse));
  for (size_t i = 0; i < parent_.size(); ++i) children_[parent_[i]].push_back(static_cast<int>(i));
  for (size_t c = 0; c < children_.size(); ++c) {
    if (children_[c].empty()) {
      throw InvalidInput("grouping is not surjective: coarse node " + std::to_string(c) + " is empty");
    }
  }
  if (coarse_grid_ && coarse_grid_->size() != coarse) {
    throw InvalidInput("coarse grid shape does not match grouping");
  }
}

GroupingFunction GroupingFunction::identity(int node_count) {
  std::vector<int> parent(static_cast<size_t>(node_count));
  for (int i = 0; i < node_count; ++i) parent[i] = i;
  return GroupingFunction(std::move(parent));
}

GroupingFunction grid_grouping_2x2(GridShape shape) {
  if (shape.rows < 1 || shape.cols < 1) throw InvalidInput("grid shape must be at least 1x1");
  const GridShape coarse{(shape.rows + 1) / 2, (shape.cols + 1) / 2};
  std::vector<int> parent(static_cast<size_t>(shape.size()));
  for (int r = 0; r < shape.rows; ++r) {
    for (int c = 0; c < shape.cols; ++c) {
      parent[r * shape.cols + c] = (r / 2) * coarse.cols + c / 2;
    }
  }
  return GroupingFunction(std::move(parent), coarse);
}

EdgePartition partition_edges(const Model& model, const GroupingFunction& g) {
  if (g.fine_count() != model.node_count()) {
    throw InvalidInput("grouping size does not match model node count");
  }
  EdgePartition out;
  out.intra.resize(static_cast<size_t>(g.coarse_count()));
  // (coarse pair, fine edge), sorted so that fine edges stay in index order.
  std::vector<std::pair<std::pair<int, int>, int>> crossing;
  for (int e = 0; e < model.edge_count(); ++e) {
    const Edge& ed = model.edge(e);
    const int a = g.parent(ed.i);
    const int b = g.parent(ed.j);
    if (a == b) {
      out.intra[a].push_back(e);
    } else {
      crossing.push_back({{std::min(a, b), std::max(a, b)}, e});
    }
  }
  std::sort(crossing.begin(), crossing.end());
  for (const auto& [key, e] : crossing) {
    if (out.coarse_edges.empty() || out.coarse_edges.back() != key) {
      out.coarse_edges.push_back(key);
      out.crossing.emplace_back();
    }
    out.crossing.back().push_back(e);
  }
  return out;
}

Model coarsen(const Model& model, const GroupingFunction& g) {
  return coarsen(model, g, partition_edges(model, g));
}

Model coarsen(const Model& model, const GroupingFunction& g, const EdgePartition& partition) {
  const int labels = model.label_count();
  UnaryTable unary = UnaryTable::Zero(g.coarse_count(), labels);
  for (int c = 0; c < g.coarse_count(); ++c) {
    for (int child : g.children(c)) unary.row(c) += model.unary().row(child);
    for (int e : partition.intra[c]) {
      const PairwisePotential& p = model.edge(e).potential;
      for (int l = 0; l < labels; ++l) unary(c, l) += p(l, l);
    }
  }

  std::vector<Edge> edges;
  edges.reserve(partition.coarse_edges.size());
  for (size_t ce = 0; ce < partition.coarse_edges.size(); ++ce) {
    const auto [ci, cj] = partition.coarse_edges[ce];
    const auto& fine = partition.crossing[ce];

    // Fine edges whose orientation disagrees with (ci, cj) contribute transposed.
    auto oriented = [&](int e) {
      const Edge& ed = model.edge(e);
      return g.parent(ed.i) == ci ? ed.potential : ed.potential.transposed();
    };

    const PairwisePotential& first = model.edge(fine.front()).potential;
    bool same_kernel = !first.is_dense();
    for (int e : fine) same_kernel = same_kernel && model.edge(e).potential.shares_kernel_with(first);

    PairwisePotential merged;
    if (same_kernel) {
      double weight = 0.0;
      for (int e : fine) weight += model.edge(e).potential.weight();
      merged = PairwisePotential::weighted(first.kernel(), weight, first.trunc());
    } else {
      DenseTable table = DenseTable::Zero(labels, labels);
      for (int e : fine) {
        const PairwisePotential p = oriented(e);
        for (int a = 0; a < labels; ++a) {
          for (int b = 0; b < labels; ++b) table(a, b) += p(a, b);
        }
      }
      merged = PairwisePotential::dense(std::move(table));
    }
    edges.push_back({ci, cj, std::move(merged)});
  }

  std::optional<GridShape> grid;
  if (model.grid() && g.coarse_grid()) grid = g.coarse_grid();
  return Model(std::move(unary), std::move(edges), grid);
}

Solution upsample(const Solution& coarse, const GroupingFunction& g) {
  if (static_cast<int>(coarse.size()) != g.coarse_count()) {
    throw InvalidInput("coarse solution size does not match grouping");
  }
  Solution fine(static_cast<size_t>(g.fine_count()));
  for (int i = 0; i < g.fine_count(); ++i) fine[i] = coarse[g.parent(i)];
  return fine;
}

Pyramid build_pyramid(const Model& model, int num_scales) {
  if (num_scales < 1) throw InvalidInput("num_scales must be >= 1");
  if (!model.grid()) {
    throw UnsupportedTopology("default 2x2 grouping needs a grid model; supply groupings explicitly");
  }
  Pyramid pyr;
  pyr.models.push_back(model);
  while (pyr.depth() < num_scales) {
    const Model& fine = pyr.models.back();
    const GridShape shape = *fine.grid();
    if (shape.rows == 1 && shape.cols == 1) break;
    GroupingFunction g = grid_grouping_2x2(shape);
    EdgePartition part = partition_edges(fine, g);
    Model coarse = coarsen(fine, g, part);
    pyr.groupings.push_back(std::move(g));
    pyr.partitions.push_back(std::move(part));
    pyr.models.push_back(std::move(coarse));
  }
  return pyr;
}

Pyramid build_pyramid(const Model& model, const std::vector<GroupingFunction>& groupings) {
  Pyramid pyr;
  pyr.models.push_back(model);
  for (const GroupingFunction& g : groupings) {
    const Model& fine = pyr.models.back();
    EdgePartition part = partition_edges(fine, g);
    Model coarse = coarsen(fine, g, part);
    pyr.groupings.push_back(g);
    pyr.partitions.push_back(std::move(part));
    pyr.models.push_back(std::move(coarse));
  }
  return pyr;
}

}  // namespace mrfc
