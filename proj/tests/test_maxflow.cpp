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
#include "mrfc/maxflow.hpp"
#include "support.hpp"

using namespace mrfc;
using namespace mrfc::testing;

namespace {

constexpr FlowAlgorithm kAlgorithms[] = {FlowAlgorithm::boykov_kolmogorov, FlowAlgorithm::dinic};

double cut_capacity(const FlowNetwork& net, const std::vector<bool>& side) {
  double c = 0.0;
  for (const FlowArc& a : net.arcs) {
    if (side[a.from] && !side[a.to]) c += a.capacity;
  }
  return c;
}

// Minimum over all 2^(n-2) s-t cuts.
double exhaustive_min_cut(const FlowNetwork& net) {
  std::vector<int> inner;
  for (int v = 0; v < net.node_count; ++v) {
    if (v != net.source && v != net.sink) inner.push_back(v);
  }
  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1u << inner.size()); ++mask) {
    std::vector<bool> side(static_cast<size_t>(net.node_count), false);
    side[net.source] = true;
    for (size_t k = 0; k < inner.size(); ++k) side[inner[k]] = (mask >> k) & 1u;
    best = std::min(best, cut_capacity(net, side));
  }
  return best;
}

FlowNetwork random_network(Rng& rng, bool integer) {
  FlowNetwork net;
  net.node_count = uniform_int(rng, 2, 12);
  net.source = uniform_int(rng, 0, net.node_count - 1);
  do {
    net.sink = uniform_int(rng, 0, net.node_count - 1);
  } while (net.sink == net.source);
  const int arcs = uniform_int(rng, 0, 3 * net.node_count);
  for (int k = 0; k < arcs; ++k) {
    const double cap = integer ? uniform_int(rng, 0, 9) : uniform_real(rng, 0.0, 9.0);
    net.arcs.push_back({uniform_int(rng, 0, net.node_count - 1), uniform_int(rng, 0, net.node_count - 1), cap});
  }
  return net;
}

}  // namespace

TEST_CASE("single arc") {
  FlowNetwork net{2, 0, 1, {{0, 1, 5.0}}};
  for (FlowAlgorithm alg : kAlgorithms) {
    const MinCut cut = max_flow_min_cut(net, alg);
    CHECK(cut.flow == 5.0);
    CHECK(cut.source_side == std::vector<bool>{true, false});
  }
}

TEST_CASE("diamond with a known bottleneck") {
  // s=0 -> {1, 2} -> t=3, plus a 1 -> 2 cross arc.
  FlowNetwork net{4, 0, 3, {{0, 1, 3}, {0, 2, 2}, {1, 3, 2}, {2, 3, 3}, {1, 2, 1}}};
  for (FlowAlgorithm alg : kAlgorithms) {
    const MinCut cut = max_flow_min_cut(net, alg);
    CHECK(cut.flow == 5.0);
    CHECK(cut_capacity(net, cut.source_side) == 5.0);
  }
  // Narrow the sink side: cut {1->3, 2->3} = 1 + 1.
  FlowNetwork narrow{4, 0, 3, {{0, 1, 3}, {0, 2, 2}, {1, 3, 1}, {2, 3, 1}, {1, 2, 1}}};
  for (FlowAlgorithm alg : kAlgorithms) {
    const MinCut cut = max_flow_min_cut(narrow, alg);
    CHECK(cut.flow == 2.0);
    CHECK(cut.source_side == std::vector<bool>{true, true, true, false});
  }
}

TEST_CASE("disconnected and degenerate networks") {
  for (FlowAlgorithm alg : kAlgorithms) {
    const MinCut none = max_flow_min_cut({3, 0, 2, {{0, 1, 4}}}, alg);
    CHECK(none.flow == 0.0);
    CHECK(none.source_side == std::vector<bool>{true, true, false});
    // Arcs into the source and out of the sink never matter.
    const MinCut back = max_flow_min_cut({3, 0, 2, {{1, 0, 4}, {2, 1, 4}, {0, 1, 1}, {1, 2, 3}, {0, 2, 2}}}, alg);
    CHECK(back.flow == 3.0);
  }
}

TEST_CASE("invalid networks are rejected") {
  for (FlowAlgorithm alg : kAlgorithms) {
    CHECK_THROWS_AS(max_flow_min_cut({2, 0, 0, {}}, alg), InvalidInput);
    CHECK_THROWS_AS(max_flow_min_cut({2, 0, 2, {}}, alg), InvalidInput);
    CHECK_THROWS_AS(max_flow_min_cut({2, 0, 1, {{0, 5, 1}}}, alg), InvalidInput);
    CHECK_THROWS_AS(max_flow_min_cut({2, 0, 1, {{0, 1, -1}}}, alg), InvalidInput);
    CHECK_THROWS_AS(max_flow_min_cut({2, 0, 1, {{0, 1, std::numeric_limits<double>::infinity()}}}, alg),
                    InvalidInput);
  }
}

TEST_CASE("flow equals the exhaustive minimum cut on random graphs") {
  Rng rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const bool integer = trial % 2 == 0;
    const FlowNetwork net = random_network(rng, integer);
    const double oracle = exhaustive_min_cut(net);
    for (FlowAlgorithm alg : kAlgorithms) {
      const MinCut cut = max_flow_min_cut(net, alg);
      CHECK(cut.source_side[net.source]);
      CHECK_FALSE(cut.source_side[net.sink]);
      if (integer) {
        CHECK(cut.flow == oracle);
        CHECK(cut_capacity(net, cut.source_side) == oracle);
      } else {
        CHECK(close(cut.flow, oracle, 1e-12));
        CHECK(close(cut_capacity(net, cut.source_side), oracle, 1e-12));
      }
    }
  }
}

TEST_CASE("both algorithms return the same residual-reachable source side") {
  Rng rng(32);
  for (int trial = 0; trial < 500; ++trial) {
    const FlowNetwork net = random_network(rng, true);
    CHECK(max_flow_min_cut(net, FlowAlgorithm::boykov_kolmogorov).source_side ==
          max_flow_min_cut(net, FlowAlgorithm::dinic).source_side);
  }
}

TEST_CASE("terminal weights on the implicit-terminal graph") {
  BkGraph g(2);
  g.add_tweights(0, 5, 1);  // 1 unit cancels directly
  g.add_tweights(1, 0, 3);
  g.add_edge(0, 1, 2, 0);
  // 1 (cancelled at node 0) + min(4, 2) through the edge.
  CHECK(g.max_flow() == 3.0);
  CHECK(g.source_side(0));
  CHECK_FALSE(g.source_side(1));

  g.reset(1);
  g.add_tweights(0, 2, 2);
  CHECK(g.max_flow() == 2.0);
  CHECK_FALSE(g.source_side(0));
}

TEST_CASE("Dinic graph reuse after reset") {
  FlowGraph g(3);
  g.add_edge(0, 1, 2);
  g.add_edge(1, 2, 1);
  CHECK(g.max_flow(0, 2) == 1.0);
  g.reset(2);
  g.add_edge(0, 1, 4, 1);
  CHECK(g.max_flow(0, 1) == 4.0);
  CHECK(g.max_flow(1, 0) == 5.0);  // residual of the first run plus the reverse capacity
  CHECK_THROWS_AS(g.max_flow(0, 0), InvalidInput);
}
