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

#include "doctest.h"
#include "mrfc/error.hpp"
#include "mrfc/solvers.hpp"
#include "support.hpp"

using namespace mrfc;
using namespace mrfc::testing;

namespace {

constexpr SolverKind kIterative[] = {SolverKind::icm, SolverKind::alpha_expansion};

SolverConfig config(SolverKind kind) {
  SolverConfig cfg;
  cfg.kind = kind;
  return cfg;
}

/// Random mask with at least one active label per node, plus a feasible labeling.
std::pair<PruningMatrix, Solution> random_pruning(Rng& rng, int nodes, int labels, double keep) {
  LabelMask mask(nodes, labels);
  Solution x(static_cast<size_t>(nodes));
  for (int i = 0; i < nodes; ++i) {
    for (int l = 0; l < labels; ++l) mask(i, l) = uniform_real(rng, 0.0, 1.0) < keep;
    x[i] = uniform_int(rng, 0, labels - 1);
    mask(i, x[i]) = true;
  }
  return {PruningMatrix(std::move(mask)), std::move(x)};
}

Model potts_model(Rng& rng, int nodes, int labels) {
  ModelOptions opt;
  opt.mixed = false;
  opt.kernel = Kernel::potts;
  return random_graph_model(rng, nodes, labels, 0.4, opt);
}

void check_trace(const SolveResult& r, bool strict) {
  REQUIRE_FALSE(r.energy_trace.empty());
  for (size_t k = 1; k < r.energy_trace.size(); ++k) {
    if (strict) {
      CHECK(r.energy_trace[k] < r.energy_trace[k - 1]);
    } else {
      CHECK(r.energy_trace[k] <= r.energy_trace[k - 1]);
    }
  }
  CHECK(r.energy_trace.back() == r.energy.total);
}

}  // namespace

TEST_CASE("solver names") {
  for (SolverKind k : {SolverKind::icm, SolverKind::alpha_expansion, SolverKind::brute_force}) {
    CHECK(solver_from_name(solver_name(k)) == k);
  }
  CHECK(solver_from_name("alpha_expansion") == SolverKind::alpha_expansion);
  CHECK_THROWS_AS(solver_from_name("fast-pd"), ConfigError);
}

TEST_CASE("optimal init on a one-node model is a fixed point") {
  UnaryTable u(1, 3);
  u << 4, 1, 7;
  const Model m(u, {});
  const PruningMatrix a = PruningMatrix::all_active(1, 3);
  for (SolverKind k : {SolverKind::icm, SolverKind::alpha_expansion, SolverKind::brute_force}) {
    const SolveResult r = solve(m, a, {1}, config(k));
    CHECK(r.x == Solution{1});
    CHECK(r.improvements == 0);
    CHECK(r.energy_trace == std::vector<double>{1.0});
  }
}

TEST_CASE("a singleton active space returns the forced labeling") {
  Rng rng(41);
  const Model m = random_grid_model(rng, 3, 3, 4);
  LabelMask mask = LabelMask::Constant(9, 4, false);
  Solution forced(9);
  for (int i = 0; i < 9; ++i) {
    forced[i] = uniform_int(rng, 0, 3);
    mask(i, forced[i]) = true;
  }
  const PruningMatrix a(mask);
  for (SolverKind k : {SolverKind::icm, SolverKind::alpha_expansion, SolverKind::brute_force}) {
    const SolveResult r = solve(m, a, forced, config(k));
    CHECK(r.x == forced);
    CHECK(r.energy.total == energy(m, forced).total);
  }
}

TEST_CASE("invalid inputs") {
  UnaryTable u(2, 2);
  u << 0, 1, 1, 0;
  const Model m(u, {{0, 1, PairwisePotential::weighted(Kernel::potts, 1.0)}});
  LabelMask mask = LabelMask::Constant(2, 2, true);
  mask(0, 1) = false;
  const PruningMatrix a(mask);
  for (SolverKind k : {SolverKind::icm, SolverKind::alpha_expansion, SolverKind::brute_force}) {
    CHECK_THROWS_AS(solve(m, a, {1, 0}, config(k)), InvalidInput);
    CHECK_THROWS_AS(solve(m, a, {0, 2}, config(k)), InvalidInput);
    CHECK_THROWS_AS(solve(m, a, {0}, config(k)), InvalidInput);
    CHECK_THROWS_AS(solve(m, PruningMatrix::all_active(3, 2), {0, 0}, config(k)), InvalidInput);
    SolverConfig bad = config(k);
    bad.max_sweeps = 0;
    CHECK_THROWS_AS(solve(m, a, {0, 0}, bad), ConfigError);
  }
  SolverConfig unknown;
  unknown.kind = static_cast<SolverKind>(7);
  CHECK_THROWS_AS(solve(m, a, {0, 0}, unknown), ConfigError);
}

TEST_CASE("ICM converges to the unary argmin in one sweep when pairwise terms vanish") {
  Rng rng(42);
  UnaryTable u(6, 3);
  for (int i = 0; i < 6; ++i) u.row(i) << 0, 1 + uniform_int(rng, 0, 5), 1 + uniform_int(rng, 0, 5);
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < 6; ++i) edges.push_back({i, i + 1, PairwisePotential::weighted(Kernel::abs_diff, 0.0)});
  const Model m(u, edges);
  const PruningMatrix a = PruningMatrix::all_active(6, 3);
  const IcmStep step = icm_step(m, a, {2, 1, 2, 1, 0, 2});
  CHECK(step.improved);
  CHECK(step.x == Solution(6, 0));
  CHECK_FALSE(icm_step(m, a, step.x).improved);

  const SolveResult r = icm(m, a, {2, 1, 2, 1, 0, 2}, config(SolverKind::icm));
  CHECK(r.x == Solution(6, 0));
  CHECK(r.iterations == 2);
  CHECK(r.improvements == 1);
}

TEST_CASE("ICM ties go to the smallest label and a tie never moves the node") {
  UnaryTable u(1, 3);
  u << 2, 1, 1;
  const Model m(u, {});
  const PruningMatrix a = PruningMatrix::all_active(1, 3);
  CHECK(icm_step(m, a, {0}).x == Solution{1});
  const IcmStep stay = icm_step(m, a, {2});
  CHECK_FALSE(stay.improved);
  CHECK(stay.x == Solution{2});
}

TEST_CASE("ICM respects the pruning mask") {
  UnaryTable u(1, 3);
  u << 5, 0, 3;
  const Model m(u, {});
  LabelMask mask = LabelMask::Constant(1, 3, true);
  mask(0, 1) = false;
  CHECK(icm_step(m, PruningMatrix(mask), {0}).x == Solution{2});
}

TEST_CASE("brute force examples") {
  UnaryTable u(1, 3);
  u << 4, 1, 7;
  const Model m(u, {});
  const SolveResult r = brute_force_solve(m, PruningMatrix::all_active(1, 3));
  CHECK(r.x == Solution{1});
  CHECK(r.energy.total == 1.0);

  LabelMask mask = LabelMask::Constant(1, 3, true);
  mask(0, 1) = false;
  const SolveResult second = brute_force_solve(m, PruningMatrix(mask));
  CHECK(second.x == Solution{0});
  CHECK(second.energy.total == 4.0);
}

TEST_CASE("brute force ties go to the lexicographically smallest labeling") {
  const Model m(UnaryTable::Zero(3, 2), {{0, 1, PairwisePotential::weighted(Kernel::potts, 1.0)}});
  CHECK(brute_force_solve(m, PruningMatrix::all_active(3, 2)).x == Solution{0, 0, 0});
}

TEST_CASE("brute force on a separable energy matches per-node minimization") {
  Rng rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = uniform_int(rng, 1, 7);
    const int labels = uniform_int(rng, 1, 4);
    ModelOptions opt;
    opt.integer = false;
    const UnaryTable u = random_unary(rng, n, labels, opt);
    std::vector<Edge> edges;
    for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, PairwisePotential::weighted(Kernel::potts, 0.0)});
    const Model m(u, edges);
    Solution expected(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) u.row(i).minCoeff(&expected[i]);
    CHECK(brute_force_solve(m, PruningMatrix::all_active(n, labels)).x == expected);
  }
}

TEST_CASE("brute force refuses oversized spaces") {
  const Model big(UnaryTable::Zero(24, 2), {});
  CHECK_THROWS_AS(brute_force_solve(big, PruningMatrix::all_active(24, 2)), CapacityError);
  // Pruning brings the same model under the limit.
  LabelMask mask = LabelMask::Constant(24, 2, true);
  for (int i = 0; i < 12; ++i) mask(i, 1) = false;
  CHECK(brute_force_solve(big, PruningMatrix(mask)).energy.total == 0.0);
}

TEST_CASE("Potts two-label model: one expansion cycle reaches the exact optimum") {
  Rng rng(44);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = uniform_int(rng, 2, 10);
    const Model m = potts_model(rng, n, 2);
    const PruningMatrix a = PruningMatrix::all_active(n, 2);
    SolverConfig cfg = config(SolverKind::alpha_expansion);
    cfg.max_sweeps = 1;
    const SolveResult r = alpha_expansion(m, a, Solution(static_cast<size_t>(n), 0), cfg);
    CHECK(r.energy.total == enumerate_minimum(m).best);
  }
}

TEST_CASE("an expansion on a label pruned everywhere is a no-op") {
  UnaryTable u(3, 2);
  u << 5, 0, 5, 0, 5, 0;
  const Model m(u, {{0, 1, PairwisePotential::weighted(Kernel::potts, 1.0)}});
  LabelMask mask = LabelMask::Constant(3, 2, true);
  mask.col(1) = false;
  const SolveResult r = alpha_expansion(m, PruningMatrix(mask), {0, 0, 0}, config(SolverKind::alpha_expansion));
  CHECK(r.x == Solution{0, 0, 0});
  CHECK(r.improvements == 0);
  CHECK(r.energy_trace.size() == 1);
}

TEST_CASE("expansion freezes nodes whose alpha is inactive") {
  UnaryTable u(2, 2);
  u << 5, 0, 5, 0;
  const Model m(u, {});
  LabelMask mask = LabelMask::Constant(2, 2, true);
  mask(1, 1) = false;
  const SolveResult r = alpha_expansion(m, PruningMatrix(mask), {0, 0}, config(SolverKind::alpha_expansion));
  CHECK(r.x == Solution{1, 0});
}

TEST_CASE("non-submodular truncated quadratic terms still give monotone feasible results") {
  Rng rng(45);
  for (int trial = 0; trial < 50; ++trial) {
    ModelOptions opt;
    opt.mixed = false;
    opt.kernel = Kernel::truncated_quadratic;
    const Model m = random_grid_model(rng, 3, 3, 5, opt);
    const auto [a, init] = random_pruning(rng, 9, 5, 0.7);
    const SolveResult r = alpha_expansion(m, a, init, config(SolverKind::alpha_expansion));
    CHECK(is_feasible(r.x, a));
    check_trace(r, true);
    CHECK(r.energy.total >= enumerate_minimum(m, &a.mask()).best);
  }
}

TEST_CASE("property: feasibility, monotone traces and oracle dominance") {
  Rng rng(46);
  for (int trial = 0; trial < 150; ++trial) {
    ModelOptions opt;
    opt.integer = trial % 3 != 0;
    const Model m = random_graph_model(rng, uniform_int(rng, 1, 7), uniform_int(rng, 1, 4), 0.5, opt);
    const auto [a, init] = random_pruning(rng, m.node_count(), m.label_count(), 0.6);
    const double oracle = brute_force_solve(m, a).energy.total;
    CHECK(oracle == doctest::Approx(enumerate_minimum(m, &a.mask()).best).epsilon(1e-12));
    CHECK(brute_force_solve(m, PruningMatrix::all_active(m.node_count(), m.label_count())).energy.total <= oracle);
    for (SolverKind k : kIterative) {
      const SolveResult r = solve(m, a, init, config(k));
      CHECK(is_feasible(r.x, a));
      check_trace(r, k == SolverKind::alpha_expansion);
      CHECK(r.energy.total <= energy(m, init).total);
      CHECK(r.energy.total >= oracle);
      CHECK(r.energy.total == energy(m, r.x).total);
    }
    const SolveResult b = solve(m, a, init, config(SolverKind::brute_force));
    CHECK(b.energy.total == oracle);
    check_trace(b, true);
  }
}

TEST_CASE("property: expansion on Potts models stays within twice the optimum") {
  // Expansion-move local minima of Potts energies are 2-approximations.
  Rng rng(47);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = uniform_int(rng, 2, 8);
    const int labels = uniform_int(rng, 2, 4);
    const Model m = potts_model(rng, n, labels);
    const SolveResult r = alpha_expansion(m, PruningMatrix::all_active(n, labels),
                                          random_solution(rng, n, labels), config(SolverKind::alpha_expansion));
    CHECK(r.energy.total <= 2.0 * enumerate_minimum(m).best);
  }
}

TEST_CASE("expansion on metric potentials ends at a single-node local minimum") {
  // Metric potentials make every move exact, so after convergence no
  // single-node switch to any label lowers the energy.
  Rng rng(48);
  constexpr Kernel kMetric[] = {Kernel::potts, Kernel::abs_diff, Kernel::truncated_abs_diff};
  for (int trial = 0; trial < 60; ++trial) {
    ModelOptions opt;
    opt.mixed = false;
    opt.kernel = kMetric[trial % 3];
    const Model m = random_grid_model(rng, 3, 4, 4, opt);
    const PruningMatrix a = PruningMatrix::all_active(12, 4);
    const SolveResult r = alpha_expansion(m, a, random_solution(rng, 12, 4), config(SolverKind::alpha_expansion));
    for (int i = 0; i < 12; ++i) {
      for (int l = 0; l < 4; ++l) {
        Solution y = r.x;
        y[i] = l;
        CHECK(energy(m, y).total >= r.energy.total);
      }
    }
  }
}

TEST_CASE("determinism for a fixed seed") {
  Rng rng(49);
  const Model m = random_grid_model(rng, 5, 5, 5);
  const PruningMatrix a = PruningMatrix::all_active(25, 5);
  const Solution init = random_solution(rng, 25, 5);
  for (bool shuffle : {false, true}) {
    SolverConfig cfg = config(SolverKind::alpha_expansion);
    cfg.shuffle_labels = shuffle;
    cfg.seed = 17;
    const SolveResult r1 = solve(m, a, init, cfg);
    const SolveResult r2 = solve(m, a, init, cfg);
    CHECK(r1.x == r2.x);
    CHECK(r1.energy_trace == r2.energy_trace);
    CHECK(r1.iterations == r2.iterations);
    CHECK(r1.improvements == r2.improvements);
  }
}

TEST_CASE("max_sweeps caps the work") {
  Rng rng(50);
  const Model m = random_grid_model(rng, 4, 4, 4);
  const PruningMatrix a = PruningMatrix::all_active(16, 4);
  for (SolverKind k : kIterative) {
    SolverConfig cfg = config(k);
    cfg.max_sweeps = 1;
    CHECK(solve(m, a, Solution(16, 0), cfg).iterations == 1);
  }
}
