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

// Random instance generators and independent reference computations shared by
// the unit and acceptance tests.

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "mrfc/coarsening.hpp"
#include "mrfc/model.hpp"

namespace mrfc::testing {

using Rng = std::mt19937_64;

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline double uniform_real(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

struct ModelOptions {
  bool integer = true;    // integer-valued costs
  bool mixed = true;      // mix kernels, including dense tables
  Kernel kernel = Kernel::abs_diff;  // used when !mixed
  int max_value = 9;
};

inline PairwisePotential random_potential(Rng& rng, int labels, const ModelOptions& opt) {
  auto value = [&](double hi) { return opt.integer ? double(uniform_int(rng, 0, int(hi))) : uniform_real(rng, 0.0, hi); };
  Kernel k = opt.kernel;
  if (opt.mixed) k = static_cast<Kernel>(uniform_int(rng, 0, 4));
  if (k == Kernel::dense) {
    DenseTable t(labels, labels);
    for (int a = 0; a < labels; ++a) {
      for (int b = 0; b < labels; ++b) t(a, b) = value(opt.max_value);
    }
    return PairwisePotential::dense(std::move(t));
  }
  const double trunc = 1.0 + value(opt.max_value);
  return PairwisePotential::weighted(k, value(opt.max_value), trunc);
}

inline UnaryTable random_unary(Rng& rng, int nodes, int labels, const ModelOptions& opt) {
  UnaryTable u(nodes, labels);
  for (int i = 0; i < nodes; ++i) {
    for (int l = 0; l < labels; ++l) {
      u(i, l) = opt.integer ? double(uniform_int(rng, 0, opt.max_value)) : uniform_real(rng, 0.0, opt.max_value);
    }
  }
  return u;
}

inline Model random_grid_model(Rng& rng, int rows, int cols, int labels, const ModelOptions& opt = {}) {
  const GridShape shape{rows, cols};
  std::vector<Edge> edges;
  for (auto [i, j] : grid_edge_pairs(shape)) edges.push_back({i, j, random_potential(rng, labels, opt)});
  return Model(random_unary(rng, shape.size(), labels, opt), std::move(edges), shape);
}

/// Arbitrary graph: each unordered pair becomes an edge with probability `density`.
inline Model random_graph_model(Rng& rng, int nodes, int labels, double density, const ModelOptions& opt = {}) {
  std::vector<Edge> edges;
  for (int i = 0; i < nodes; ++i) {
    for (int j = i + 1; j < nodes; ++j) {
      if (uniform_real(rng, 0.0, 1.0) < density) edges.push_back({i, j, random_potential(rng, labels, opt)});
    }
  }
  return Model(random_unary(rng, nodes, labels, opt), std::move(edges));
}

/// Surjective random map of `fine` nodes onto `coarse` groups.
inline GroupingFunction random_grouping(Rng& rng, int fine, int coarse) {
  std::vector<int> parent(static_cast<size_t>(fine));
  for (int i = 0; i < fine; ++i) parent[i] = i < coarse ? i : uniform_int(rng, 0, coarse - 1);
  std::shuffle(parent.begin(), parent.end(), rng);
  return GroupingFunction(std::move(parent));
}

inline Solution random_solution(Rng& rng, int nodes, int labels) {
  Solution x(static_cast<size_t>(nodes));
  for (int& l : x) l = uniform_int(rng, 0, labels - 1);
  return x;
}

/// Energy straight from the definition, without the library's accumulation.
inline double reference_energy(const Model& m, const Solution& x) {
  double e = 0.0;
  for (int i = 0; i < m.node_count(); ++i) e += m.unary()(i, x[i]);
  for (const Edge& ed : m.edges()) e += ed.potential.to_dense(m.label_count())(x[ed.i], x[ed.j]);
  return e;
}

struct Enumeration {
  double best = std::numeric_limits<double>::infinity();
  Solution argmin;             // lexicographically smallest minimizer
  std::vector<Solution> ties;  // every minimizer (within `tie_tol`)
  long states = 0;
};

/// Exhaustive minimum over the labelings allowed by `active` (all when empty).
inline Enumeration enumerate_minimum(const Model& m, const LabelMask* active = nullptr, double tie_tol = 0.0) {
  const int n = m.node_count();
  const int labels = m.label_count();
  Enumeration out;
  Solution x(static_cast<size_t>(n), 0);
  std::vector<std::vector<int>> choices(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int l = 0; l < labels; ++l) {
      if (!active || (*active)(i, l)) choices[i].push_back(l);
    }
  }
  std::vector<size_t> idx(static_cast<size_t>(n), 0);
  for (int i = 0; i < n; ++i) x[i] = choices[i][0];
  while (true) {
    ++out.states;
    const double e = reference_energy(m, x);
    if (e < out.best - tie_tol) {
      out.best = e;
      out.argmin = x;
      out.ties.assign(1, x);
    } else if (e <= out.best + tie_tol) {
      out.ties.push_back(x);
    }
    int k = n - 1;
    while (k >= 0 && ++idx[k] == choices[k].size()) {
      idx[k] = 0;
      x[k] = choices[k][0];
      --k;
    }
    if (k < 0) break;
    x[k] = choices[k][idx[k]];
  }
  return out;
}

inline bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(1.0, std::max(std::abs(a), std::abs(b))); }

}  // namespace mrfc::testing
