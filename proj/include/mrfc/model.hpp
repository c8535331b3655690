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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mrfc {

/// Per-node label costs, one row per node.
using UnaryTable = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
/// Full |L| x |L| pairwise table, indexed (label of first node, label of second node).
using DenseTable = Eigen::MatrixXd;
/// Binary node x label mask.
using LabelMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// One label index per node.
using Solution = std::vector<int>;

enum class Kernel : std::uint8_t {
  abs_diff,             // w |l0 - l1|
  truncated_abs_diff,   // w min(|l0 - l1|, T)
  truncated_quadratic,  // w min((l0 - l1)^2, T)
  potts,                // w [l0 != l1]
  dense,                // table lookup
};

const char* kernel_name(Kernel k);
Kernel kernel_from_name(const std::string& name);

/// Pairwise cost: either a parametric kernel scaled by a weight or a dense table.
///
/// Dense tables are shared between copies, so copying a model with large
/// tables is cheap. Parametric evaluation is unchecked; use
/// evaluate_pairwise() for range-checked access.
class PairwisePotential {
 public:
  PairwisePotential() = default;

  static PairwisePotential weighted(Kernel kernel, double weight, double trunc = 0.0);
  static PairwisePotential dense(DenseTable table);

  Kernel kernel() const { return kernel_; }
  bool is_dense() const { return kernel_ == Kernel::dense; }
  double weight() const { return weight_; }
  double trunc() const { return trunc_; }
  const DenseTable& table() const { return *table_; }

  double operator()(int l0, int l1) const {
    switch (kernel_) {
      case Kernel::abs_diff:
        return weight_ * std::abs(l0 - l1);
      case Kernel::truncated_abs_diff:
        return weight_ * std::min(static_cast<double>(std::abs(l0 - l1)), trunc_);
      case Kernel::truncated_quadratic: {
        const double d = l0 - l1;
        return weight_ * std::min(d * d, trunc_);
      }
      case Kernel::potts:
        return l0 == l1 ? 0.0 : weight_;
      case Kernel::dense:
        return (*table_)(l0, l1);
    }
    return 0.0;
  }

  /// Same kernel family and truncation, so weights may simply be added.
  bool shares_kernel_with(const PairwisePotential& other) const;

  PairwisePotential scaled(double c) const;
  /// Potential with the roles of the two endpoints swapped.
  PairwisePotential transposed() const;

  /// Representative "edge weight": the weight for parametric kernels, the
  /// mean off-diagonal entry for dense tables.
  double nominal_weight() const;

  /// Dense materialization over `label_count` labels.
  DenseTable to_dense(int label_count) const;

 private:
  Kernel kernel_ = Kernel::abs_diff;
  double weight_ = 0.0;
  double trunc_ = 0.0;
  std::shared_ptr<const DenseTable> table_;
};

/// Range-checked pairwise evaluation.
double evaluate_pairwise(const PairwisePotential& p, int l0, int l1, int label_count);

struct Edge {
  int i = 0;
  int j = 0;
  PairwisePotential potential;
};

struct GridShape {
  int rows = 0;
  int cols = 0;
  int size() const { return rows * cols; }
  friend bool operator==(const GridShape&, const GridShape&) = default;
};

/// 4-connectivity edge list of a grid, sorted lexicographically by (i, j).
std::vector<std::pair<int, int>> grid_edge_pairs(GridShape shape);

/// An edge seen from one of its endpoints.
struct Incidence {
  int edge = 0;
  int other = 0;
  bool first = true;  // true when this node is the edge's `i`
};

/// Discrete pairwise MRF. Immutable once constructed; the constructor
/// validates every structural invariant.
class Model {
 public:
  Model(UnaryTable unary, std::vector<Edge> edges, std::optional<GridShape> grid = std::nullopt);

  int node_count() const { return static_cast<int>(unary_.rows()); }
  int label_count() const { return static_cast<int>(unary_.cols()); }
  const UnaryTable& unary() const { return unary_; }
  double unary(int i, int l) const { return unary_(i, l); }
  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[e]; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::optional<GridShape>& grid() const { return grid_; }

  std::span<const Incidence> incident(int i) const {
    return {incidence_.data() + offsets_[i], incidence_.data() + offsets_[i + 1]};
  }

  /// Pairwise cost on edge e with node `node` at label `l` and its neighbour at `other_label`.
  double pairwise_from(const Incidence& inc, int l, int other_label) const {
    const auto& p = edges_[inc.edge].potential;
    return inc.first ? p(l, other_label) : p(other_label, l);
  }

 private:
  UnaryTable unary_;
  std::vector<Edge> edges_;
  std::optional<GridShape> grid_;
  std::vector<Incidence> incidence_;
  std::vector<int> offsets_;
};

struct Energy {
  double total = 0.0;
  double unary = 0.0;
  double pairwise = 0.0;
};

void validate_solution(const Model& model, const Solution& x);

/// Sum of unary then pairwise terms, accumulated in node then edge index order.
Energy energy(const Model& model, const Solution& x);

/// Per-node unary argmin, ties to the smallest label.
Solution unary_argmin(const Model& model);

/// Node x label active/pruned mask with at least one active label per node.
class PruningMatrix {
 public:
  explicit PruningMatrix(LabelMask mask);

  static PruningMatrix all_active(int node_count, int label_count);

  int node_count() const { return static_cast<int>(mask_.rows()); }
  int label_count() const { return static_cast<int>(mask_.cols()); }
  bool active(int i, int l) const { return mask_(i, l); }
  const LabelMask& mask() const { return mask_; }

  long active_count() const { return mask_.count(); }
  int active_count(int i) const { return static_cast<int>(mask_.row(i).count()); }
  double active_ratio() const {
    return static_cast<double>(active_count()) / static_cast<double>(mask_.size());
  }

 private:
  LabelMask mask_;
};

bool is_feasible(const Solution& x, const PruningMatrix& a);

/// Model with every unary and pairwise value multiplied by c > 0.
Model scale_potentials(const Model& model, double c);

}  // namespace mrfc
