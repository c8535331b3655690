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

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "mrfc/model.hpp"

namespace mrfc {

enum class SolverKind : std::uint8_t { icm, alpha_expansion, brute_force };

const char* solver_name(SolverKind kind);
SolverKind solver_from_name(const std::string& name);

struct SolverConfig {
  SolverKind kind = SolverKind::alpha_expansion;
  /// Cap on ICM sweeps or expansion cycles.
  int max_sweeps = 100;
  /// When set, expansion visits labels in a seeded random order each cycle.
  bool shuffle_labels = false;
  std::uint64_t seed = 0;
};

struct SolveResult {
  Solution x;
  Energy energy;
  /// Sweeps (ICM) or cycles (expansion) executed, including the final idle one.
  int iterations = 0;
  /// Accepted improving steps.
  int improvements = 0;
  std::chrono::duration<double> wall_time{0.0};
  /// Initial energy followed by the total after every accepted improvement.
  std::vector<double> energy_trace;
};

/// Monotone minimization of E over S(model, a) starting from `init`.
SolveResult solve(const Model& model, const PruningMatrix& a, const Solution& init, const SolverConfig& cfg);

struct IcmStep {
  Solution x;
  bool improved = false;
};

/// One sweep in node order; a node moves to its conditional-minimum active
/// label (ties to the smallest index) only when that strictly lowers its cost.
IcmStep icm_step(const Model& model, const PruningMatrix& a, Solution x);

SolveResult icm(const Model& model, const PruningMatrix& a, const Solution& init, const SolverConfig& cfg);

SolveResult alpha_expansion(const Model& model, const PruningMatrix& a, const Solution& init,
                            const SolverConfig& cfg);

/// Largest active state space brute_force_solve() will enumerate.
inline constexpr double kBruteForceLimit = 1e7;

/// Exact minimum over S(model, a); ties go to the lexicographically smallest labeling.
SolveResult brute_force_solve(const Model& model, const PruningMatrix& a);

}  // namespace mrfc
