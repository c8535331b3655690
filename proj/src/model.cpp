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

#include "mrfc/model.hpp"

#include <algorithm>

#include "mrfc/error.hpp"

namespace mrfc {

const char* kernel_name(Kernel k) {
  switch (k) {
    case Kernel::abs_diff: return "abs_diff";
    case Kernel::truncated_abs_diff: return "truncated_abs_diff";
    case Kernel::truncated_quadratic: return "truncated_quadratic";
    case Kernel::potts: return "potts";
    case Kernel::dense: return "dense";
  }
  return "?";
}

Kernel kernel_from_name(const std::string& name) {
  for (Kernel k : {Kernel::abs_diff, Kernel::truncated_abs_diff, Kernel::truncated_quadratic,
                   Kernel::potts, Kernel::dense}) {
    if (name == kernel_name(k)) return k;
  }
  throw InvalidInput("unknown pairwise kernel '" + name + "'");
}

PairwisePotential PairwisePotential::weighted(Kernel kernel, double weight, double trunc) {
  if (kernel == Kernel::dense) throw InvalidInput("dense potentials need a table");
  if (!std::isfinite(weight) || weight < 0.0) throw InvalidInput("edge weight must be finite and >= 0");
  const bool truncated = kernel == Kernel::truncated_abs_diff || kernel == Kernel::truncated_quadratic;
  if (truncated && (!std::isfinite(trunc) || trunc < 0.0)) {
    throw InvalidInput("truncation must be finite and >= 0");
  }
  PairwisePotential p;
  p.kernel_ = kernel;
  p.weight_ = weight;
  p.trunc_ = truncated ? trunc : 0.0;
  return p;
}

PairwisePotential PairwisePotential::dense(DenseTable table) {
  if (table.rows() != table.cols() || table.rows() == 0) {
    throw InvalidInput("dense pairwise table must be square and non-empty");
  }
  if (!table.allFinite()) throw InvalidInput("dense pairwise table has non-finite entries");
  PairwisePotential p;
  p.kernel_ = Kernel::dense;
  p.table_ = std::make_shared<const DenseTable>(std::move(table));
  return p;
}

bool PairwisePotential::shares_kernel_with(const PairwisePotential& other) const {
  return !is_dense() && !other.is_dense() && kernel_ == other.kernel_ && trunc_ == other.trunc_;
}

PairwisePotential PairwisePotential::scaled(double c) const {
  if (is_dense()) return dense(*table_ * c);
  PairwisePotential p = *this;
  p.weight_ = weight_ * c;
  return p;
}

PairwisePotential PairwisePotential::transposed() const {
  if (!is_dense()) return *this;
  return dense(table_->transpose());
}

double PairwisePotential::nominal_weight() const {
  if (!is_dense()) return weight_;
  const auto n = table_->rows();
  if (n < 2) return 0.0;
  const double off = table_->sum() - table_->trace();
  return off / static_cast<double>(n * (n - 1));
}

DenseTable PairwisePotential::to_dense(int label_count) const {
  if (is_dense()) return *table_;
  DenseTable t(label_count, label_count);
  for (int a = 0; a < label_count; ++a) {
    for (int b = 0; b < label_count; ++b) t(a, b) = (*this)(a, b);
  }
  return t;
}

double evaluate_pairwise(const PairwisePotential& p, int l0, int l1, int label_count) {
  if (l0 < 0 || l1 < 0 || l0 >= label_count || l1 >= label_count) {
    throw InvalidInput("label out of range in pairwise evaluation");
  }
  if (p.is_dense() && p.table().rows() != label_count) {
    throw InvalidInput("dense table size does not match label count");
  }
  return p(l0, l1);
}

std::vector<std::pair<int, int>> grid_edge_pairs(GridShape shape) {
  std::vector<std::pair<int, int>> out;
  out.reserve(static_cast<size_t>(2 * shape.size()));
  for (int r = 0; r < shape.rows; ++r) {
    for (int c = 0; c < shape.cols; ++c) {
      const int i = r * shape.cols + c;
      if (c + 1 < shape.cols) out.emplace_back(i, i + 1);
      if (r + 1 < shape.rows) out.emplace_back(i, i + shape.cols);
    }
  }
  return out;
}

Model::Model(UnaryTable unary, std::vector<Edge> edges, std::optional<GridShape> grid)
    : unary_(std::move(unary)), edges_(std::move(edges)), grid_(grid) {
  const int n = node_count();
  const int labels = label_count();
  if (n < 1) throw InvalidInput("model needs at least one node");
  if (labels < 1) throw InvalidInput("model needs at least one label");
  if (!unary_.allFinite()) throw InvalidInput("unary table has non-finite costs");

  std::vector<std::pair<int, int>> seen;
  seen.reserve(edges_.size());
  for (size_t e = 0; e < edges_.size(); ++e) {
    const Edge& ed = edges_[e];
    if (ed.i < 0 || ed.j < 0 || ed.i >= n || ed.j >= n) {
      throw InvalidInput("edge " + std::to_string(e) + " references an invalid node");
    }
    if (ed.i == ed.j) throw InvalidInput("edge " + std::to_string(e) + " is a self-loop");
    if (ed.i > ed.j) throw InvalidInput("edge " + std::to_string(e) + " must satisfy i < j");
    seen.emplace_back(ed.i, ed.j);
    if (ed.potential.is_dense() && ed.potential.table().rows() != labels) {
      throw InvalidInput("edge " + std::to_string(e) + " dense table size differs from label count");
    }
  }

  if (!std::is_sorted(seen.begin(), seen.end())) std::sort(seen.begin(), seen.end());
  const auto dup = std::adjacent_find(seen.begin(), seen.end());
  if (dup != seen.end()) {
    throw InvalidInput("duplicate edge (" + std::to_string(dup->first) + "," + std::to_string(dup->second) + ")");
  }

  if (grid_) {
    if (grid_->rows < 1 || grid_->cols < 1 || grid_->size() != n) {
      throw InvalidInput("grid shape does not match node count");
    }
    const auto expected = grid_edge_pairs(*grid_);
    if (expected.size() != seen.size() ||
        !std::equal(expected.begin(), expected.end(), seen.begin())) {
      throw InvalidInput("grid model edges are not the 4-connectivity set");
    }
  }

  offsets_.assign(static_cast<size_t>(n) + 1, 0);
  for (const Edge& ed : edges_) {
    ++offsets_[ed.i + 1];
    ++offsets_[ed.j + 1];
  }
  for (int i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
  incidence_.resize(2 * edges_.size());
  std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
  for (size_t e = 0; e < edges_.size(); ++e) {
    const Edge& ed = edges_[e];
    incidence_[fill[ed.i]++] = {static_cast<int>(e), ed.j, true};
    incidence_[fill[ed.j]++] = {static_cast<int>(e), ed.i, false};
  }
}

void validate_solution(const Model& model, const Solution& x) {
  if (static_cast<int>(x.size()) != model.node_count()) {
    throw InvalidInput("solution has " + std::to_string(x.size()) + " labels, model has " +
                       std::to_string(model.node_count()) + " nodes");
  }
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0 || x[i] >= model.label_count()) {
      throw InvalidInput("solution label out of range at node " + std::to_string(i));
    }
  }
}

Energy energy(const Model& model, const Solution& x) {
  validate_solution(model, x);
  Energy e;
  for (int i = 0; i < model.node_count(); ++i) e.unary += model.unary(i, x[i]);
  for (const Edge& ed : model.edges()) e.pairwise += ed.potential(x[ed.i], x[ed.j]);
  e.total = e.unary + e.pairwise;
  return e;
}

Solution unary_argmin(const Model& model) {
  Solution x(model.node_count());
  for (int i = 0; i < model.node_count(); ++i) {
    Eigen::Index best = 0;
    model.unary().row(i).minCoeff(&best);
    x[i] = static_cast<int>(best);
  }
  return x;
}

PruningMatrix::PruningMatrix(LabelMask mask) : mask_(std::move(mask)) {
  for (Eigen::Index i = 0; i < mask_.rows(); ++i) {
    if (!mask_.row(i).any()) {
      throw InvalidInput("pruning matrix leaves node " + std::to_string(i) + " without an active label");
    }
  }
}

PruningMatrix PruningMatrix::all_active(int node_count, int label_count) {
  return PruningMatrix(LabelMask::Constant(node_count, label_count, true));
}

bool is_feasible(const Solution& x, const PruningMatrix& a) {
  if (static_cast<int>(x.size()) != a.node_count()) {
    throw InvalidInput("solution and pruning matrix disagree on node count");
  }
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0 || x[i] >= a.label_count()) throw InvalidInput("solution label out of range");
    if (!a.active(static_cast<int>(i), x[i])) return false;
  }
  return true;
}

Model scale_potentials(const Model& model, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidInput("scaling factor must be positive");
  std::vector<Edge> edges(model.edges().begin(), model.edges().end());
  for (Edge& e : edges) e.potential = e.potential.scaled(c);
  return Model(model.unary() * c, std::move(edges), model.grid());
}

}  // namespace mrfc
