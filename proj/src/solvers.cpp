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

#include "mrfc/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "mrfc/error.hpp"
#include "mrfc/maxflow.hpp"

namespace mrfc {

namespace {

using Clock = std::chrono::steady_clock;

void require_feasible(const Model& model, const PruningMatrix& a, const Solution& init) {
  validate_solution(model, init);
  if (a.node_count() != model.node_count() || a.label_count() != model.label_count()) {
    throw InvalidInput("pruning matrix shape does not match model");
  }
  if (!is_feasible(init, a)) throw InvalidInput("initial solution is outside the pruned space");
}

// Accepting only clear decreases keeps round-off from cycling moves.
bool strictly_lower(double candidate, double current) {
  return candidate < current - 1e-12 * std::max(1.0, std::abs(current));
}

double local_cost(const Model& model, const Solution& x, int i, int l) {
  double cost = model.unary(i, l);
  for (const Incidence& inc : model.incident(i)) cost += model.pairwise_from(inc, l, x[inc.other]);
  return cost;
}

}  // namespace

const char* solver_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::icm: return "icm";
    case SolverKind::alpha_expansion: return "alpha-expansion";
    case SolverKind::brute_force: return "brute-force";
  }
  return "?";
}

SolverKind solver_from_name(const std::string& name) {
  if (name == "icm") return SolverKind::icm;
  if (name == "alpha-expansion" || name == "alpha_expansion") return SolverKind::alpha_expansion;
  if (name == "brute-force" || name == "brute_force") return SolverKind::brute_force;
  throw ConfigError("unknown solver '" + name + "'");
}

IcmStep icm_step(const Model& model, const PruningMatrix& a, Solution x) {
  IcmStep step;
  for (int i = 0; i < model.node_count(); ++i) {
    const double current = local_cost(model, x, i, x[i]);
    int best = x[i];
    double best_cost = std::numeric_limits<double>::infinity();
    for (int l = 0; l < model.label_count(); ++l) {
      if (!a.active(i, l)) continue;
      const double c = local_cost(model, x, i, l);
      if (c < best_cost) {
        best = l;
        best_cost = c;
      }
    }
    if (best != x[i] && best_cost < current) {
      x[i] = best;
      step.improved = true;
    }
  }
  step.x = std::move(x);
  return step;
}

SolveResult icm(const Model& model, const PruningMatrix& a, const Solution& init, const SolverConfig& cfg) {
  require_feasible(model, a, init);
  const auto t0 = Clock::now();
  SolveResult res;
  res.x = init;
  res.energy_trace.push_back(energy(model, res.x).total);
  for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
    ++res.iterations;
    IcmStep step = icm_step(model, a, res.x);
    if (!step.improved) break;
    res.x = std::move(step.x);
    res.energy_trace.push_back(energy(model, res.x).total);
    ++res.improvements;
  }
  res.energy = energy(model, res.x);
  res.wall_time = Clock::now() - t0;
  return res;
}

SolveResult alpha_expansion(const Model& model, const PruningMatrix& a, const Solution& init,
                            const SolverConfig& cfg) {
  require_feasible(model, a, init);
  const auto t0 = Clock::now();
  const int n = model.node_count();
  const int labels = model.label_count();

  SolveResult res;
  res.x = init;
  double current = energy(model, res.x).total;
  res.energy_trace.push_back(current);

  std::vector<int> order(static_cast<size_t>(labels));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(cfg.seed);

  BkGraph graph;
  std::vector<int> var(static_cast<size_t>(n), -1);
  std::vector<int> nodes;
  std::vector<double> delta;
  std::vector<int> switched;
  std::vector<char> is_switched(static_cast<size_t>(n), 0);
  // Accepted-move count at which each label was last tried; a label is
  // retried only after some other move has been accepted.
  std::vector<int> failed_at(static_cast<size_t>(labels), -1);

  for (int cycle = 0; cycle < cfg.max_sweeps; ++cycle) {
    ++res.iterations;
    if (cfg.shuffle_labels) std::shuffle(order.begin(), order.end(), rng);
    bool changed = false;

    for (int alpha : order) {
      if (failed_at[alpha] == res.improvements) continue;
      failed_at[alpha] = res.improvements;
      Solution& x = res.x;
      nodes.clear();
      for (int i = 0; i < n; ++i) {
        if (x[i] != alpha && a.active(i, alpha)) {
          var[i] = static_cast<int>(nodes.size());
          nodes.push_back(i);
        } else {
          var[i] = -1;
        }
      }
      if (nodes.empty()) continue;

      const int nv = static_cast<int>(nodes.size());
      graph.reset(nv);
      // delta[v]: cost(switch) - cost(keep) for variable v, pairwise corrections folded in.
      delta.assign(static_cast<size_t>(nv), 0.0);
      for (int v = 0; v < nv; ++v) {
        const int i = nodes[v];
        delta[v] = model.unary(i, alpha) - model.unary(i, x[i]);
      }
      // Only edges touching a variable matter; pairs of variables are visited from their `i` end.
      for (int vi = 0; vi < nv; ++vi) {
        const int i = nodes[vi];
        for (const Incidence& inc : model.incident(i)) {
          const int j = inc.other;
          const int vj = var[j];
          if (vj < 0) {
            delta[vi] += model.pairwise_from(inc, alpha, x[j]) - model.pairwise_from(inc, x[i], x[j]);
            continue;
          }
          if (!inc.first) continue;
          const PairwisePotential& p = model.edge(inc.edge).potential;
          const double keep_keep = p(x[i], x[j]);
          const double keep_switch = p(x[i], alpha);
          double switch_keep = p(alpha, x[j]);
          const double switch_switch = p(alpha, alpha);
          // Non-submodular pairs: raise a disagreement cost until submodular.
          const double violation = keep_keep + switch_switch - keep_switch - switch_keep;
          if (violation > 0.0) switch_keep += violation;
          delta[vi] += switch_keep - keep_keep;
          delta[vj] += switch_switch - switch_keep;
          const double cap = keep_switch + switch_keep - keep_keep - switch_switch;
          if (cap > 0.0) graph.add_edge(vi, vj, cap);
        }
      }
      for (int v = 0; v < nv; ++v) {
        graph.add_tweights(v, std::max(delta[v], 0.0), std::max(-delta[v], 0.0));
      }
      graph.max_flow();

      switched.clear();
      for (int v = 0; v < nv; ++v) {
        if (!graph.source_side(v)) {
          switched.push_back(nodes[v]);
          is_switched[nodes[v]] = 1;
        }
      }
      if (switched.empty()) continue;
      double gain = 0.0;
      for (int i : switched) {
        gain += model.unary(i, alpha) - model.unary(i, x[i]);
        for (const Incidence& inc : model.incident(i)) {
          const int j = inc.other;
          if (is_switched[j] && j < i) continue;
          const int lj = is_switched[j] ? alpha : x[j];
          gain += model.pairwise_from(inc, alpha, lj) - model.pairwise_from(inc, x[i], x[j]);
        }
      }
      for (int i : switched) is_switched[i] = 0;
      const double next = current + gain;
      if (strictly_lower(next, current)) {
        for (int i : switched) x[i] = alpha;
        current = energy(model, x).total;
        res.energy_trace.push_back(current);
        ++res.improvements;
        failed_at[alpha] = res.improvements;
        changed = true;
      }
    }
    if (!changed) break;
  }
  res.energy = energy(model, res.x);
  res.wall_time = Clock::now() - t0;
  return res;
}

SolveResult brute_force_solve(const Model& model, const PruningMatrix& a) {
  if (a.node_count() != model.node_count() || a.label_count() != model.label_count()) {
    throw InvalidInput("pruning matrix shape does not match model");
  }
  const auto t0 = Clock::now();
  const int n = model.node_count();
  std::vector<std::vector<int>> choices(static_cast<size_t>(n));
  double space = 1.0;
  for (int i = 0; i < n; ++i) {
    for (int l = 0; l < model.label_count(); ++l) {
      if (a.active(i, l)) choices[i].push_back(l);
    }
    space *= static_cast<double>(choices[i].size());
  }
  if (space > kBruteForceLimit) {
    throw CapacityError("brute force refused: " + std::to_string(space) + " states exceed the limit");
  }

  // Odometer with the last node fastest enumerates in lexicographic order.
  std::vector<int> digit(static_cast<size_t>(n), 0);
  Solution x(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) x[i] = choices[i][0];
  Solution best = x;
  double best_energy = energy(model, x).total;
  while (true) {
    int k = n - 1;
    while (k >= 0 && digit[k] + 1 == static_cast<int>(choices[k].size())) {
      digit[k] = 0;
      x[k] = choices[k][0];
      --k;
    }
    if (k < 0) break;
    ++digit[k];
    x[k] = choices[k][digit[k]];
    double u = 0.0;
    double p = 0.0;
    for (int i = 0; i < n; ++i) u += model.unary(i, x[i]);
    for (const Edge& e : model.edges()) p += e.potential(x[e.i], x[e.j]);
    const double total = u + p;
    if (total < best_energy) {
      best_energy = total;
      best = x;
    }
  }

  SolveResult res;
  res.x = std::move(best);
  res.energy = energy(model, res.x);
  res.iterations = 1;
  res.energy_trace.push_back(res.energy.total);
  res.wall_time = Clock::now() - t0;
  return res;
}

SolveResult solve(const Model& model, const PruningMatrix& a, const Solution& init, const SolverConfig& cfg) {
  if (cfg.max_sweeps < 1) throw ConfigError("max_sweeps must be >= 1");
  switch (cfg.kind) {
    case SolverKind::icm:
      return icm(model, a, init, cfg);
    case SolverKind::alpha_expansion:
      return alpha_expansion(model, a, init, cfg);
    case SolverKind::brute_force: {
      require_feasible(model, a, init);
      SolveResult res = brute_force_solve(model, a);
      // The exact optimum never exceeds the feasible init.
      const double e0 = energy(model, init).total;
      res.energy_trace.insert(res.energy_trace.begin(), e0);
      if (res.energy.total == e0) res.energy_trace.pop_back();
      return res;
    }
  }
  throw ConfigError("unknown solver kind");
}

}  // namespace mrfc
