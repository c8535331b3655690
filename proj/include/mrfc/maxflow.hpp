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

#include <cstdint>
#include <vector>

namespace mrfc {

/// s-t flow network solved with Dinic's blocking-flow algorithm.
///
/// Capacities are doubles; the number of phases is bounded by the node count
/// regardless of capacity values, so real-valued capacities terminate.
class FlowGraph {
 public:
  explicit FlowGraph(int node_count = 0);

  /// Drops all arcs and resizes to `node_count` nodes.
  void reset(int node_count);

  int node_count() const { return node_count_; }

  /// Arc u -> v with capacity `cap` and reverse capacity `rev_cap`.
  void add_edge(int u, int v, double cap, double rev_cap = 0.0);

  double max_flow(int source, int sink);

  /// After max_flow(): nodes reachable from the source in the residual graph.
  const std::vector<bool>& source_side() const { return reachable_; }

 private:
  struct Arc {
    int to;
    double cap;
  };

  void build_csr();
  bool bfs(int source, int sink);
  double augment(int u, int sink, double pushed);

  int node_count_ = 0;
  std::vector<int> from_;
  std::vector<Arc> raw_;  // paired: arc k and k^1 are mutual reverses
  std::vector<int> order_;
  std::vector<int> start_;
  std::vector<int> level_;
  std::vector<int> cursor_;
  std::vector<int> queue_;
  std::vector<bool> reachable_;
};

/// Boykov-Kolmogorov augmenting-path max-flow with implicit terminals.
///
/// Grows search trees from both terminals and reuses them after every
/// augmentation, which suits the shallow grid graphs built by expansion moves.
class BkGraph {
 public:
  explicit BkGraph(int node_count = 0);

  void reset(int node_count);
  int node_count() const { return static_cast<int>(nodes_.size()); }

  /// Adds source -> i and i -> sink capacities.
  void add_tweights(int i, double cap_source, double cap_sink);
  /// Arc i -> j with capacity `cap`, j -> i with `rev_cap`.
  void add_edge(int i, int j, double cap, double rev_cap = 0.0);

  double max_flow();

  /// After max_flow(): true iff i is reachable from the source in the residual graph.
  bool source_side(int i) const;

 private:
  static constexpr int kNone = -1;
  static constexpr int kTerminal = -2;
  static constexpr int kOrphan = -3;

  struct Node {
    int first = kNone;   // first outgoing arc
    int parent = kNone;  // arc towards the parent, or a marker
    int ts = 0;
    int dist = 0;
    double tr_cap = 0.0;  // > 0: residual from source, < 0: residual to sink
    bool sink = false;
    bool active = false;
  };
  struct Arc {
    int head;
    int next;
    double r_cap;
  };

  int sister(int a) const { return a ^ 1; }
  void set_active(int i);
  int next_active();
  void augment(int middle);
  void process_source_orphan(int i);
  void process_sink_orphan(int i);

  std::vector<Node> nodes_;
  std::vector<Arc> arcs_;
  std::vector<int> queue_;
  std::size_t queue_head_ = 0;
  std::vector<int> orphans_;
  double flow_ = 0.0;
  int time_ = 0;
};

struct FlowArc {
  int from = 0;
  int to = 0;
  double capacity = 0.0;
};

struct FlowNetwork {
  int node_count = 0;
  int source = 0;
  int sink = 1;
  std::vector<FlowArc> arcs;
};

struct MinCut {
  double flow = 0.0;
  std::vector<bool> source_side;
};

enum class FlowAlgorithm : std::uint8_t { boykov_kolmogorov, dinic };

/// Max-flow value and the residual-reachable source side of a minimum cut.
MinCut max_flow_min_cut(const FlowNetwork& network, FlowAlgorithm algorithm = FlowAlgorithm::boykov_kolmogorov);

}  // namespace mrfc
