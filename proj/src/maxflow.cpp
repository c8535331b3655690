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

#include "mrfc/maxflow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mrfc/error.hpp"

namespace mrfc {

namespace {
constexpr int kInfDist = std::numeric_limits<int>::max();
}  // namespace

FlowGraph::FlowGraph(int node_count) { reset(node_count); }

void FlowGraph::reset(int node_count) {
  node_count_ = node_count;
  from_.clear();
  raw_.clear();
}

void FlowGraph::add_edge(int u, int v, double cap, double rev_cap) {
  from_.push_back(u);
  raw_.push_back({v, cap});
  from_.push_back(v);
  raw_.push_back({u, rev_cap});
}

// order_ lists arc ids grouped by tail node; start_ indexes into it.
void FlowGraph::build_csr() {
  start_.assign(static_cast<size_t>(node_count_) + 1, 0);
  for (int u : from_) ++start_[u + 1];
  for (int i = 0; i < node_count_; ++i) start_[i + 1] += start_[i];
  order_.resize(raw_.size());
  std::vector<int> fill(start_.begin(), start_.end() - 1);
  for (size_t k = 0; k < raw_.size(); ++k) order_[fill[from_[k]]++] = static_cast<int>(k);
}

bool FlowGraph::bfs(int source, int sink) {
  level_.assign(static_cast<size_t>(node_count_), -1);
  queue_.clear();
  level_[source] = 0;
  queue_.push_back(source);
  for (size_t head = 0; head < queue_.size(); ++head) {
    const int u = queue_[head];
    for (int p = start_[u]; p < start_[u + 1]; ++p) {
      const Arc& a = raw_[order_[p]];
      if (a.cap > 0.0 && level_[a.to] < 0) {
        level_[a.to] = level_[u] + 1;
        queue_.push_back(a.to);
      }
    }
  }
  return level_[sink] >= 0;
}

double FlowGraph::augment(int u, int sink, double pushed) {
  if (u == sink) return pushed;
  for (int& p = cursor_[u]; p < start_[u + 1]; ++p) {
    const int k = order_[p];
    Arc& a = raw_[k];
    if (a.cap <= 0.0 || level_[a.to] != level_[u] + 1) continue;
    const double got = augment(a.to, sink, std::min(pushed, a.cap));
    if (got > 0.0) {
      a.cap -= got;
      raw_[k ^ 1].cap += got;
      return got;
    }
  }
  return 0.0;
}

double FlowGraph::max_flow(int source, int sink) {
  if (source < 0 || sink < 0 || source >= node_count_ || sink >= node_count_ || source == sink) {
    throw InvalidInput("invalid source/sink for max-flow");
  }
  build_csr();
  double total = 0.0;
  while (bfs(source, sink)) {
    cursor_.assign(start_.begin(), start_.end() - 1);
    while (true) {
      const double f = augment(source, sink, std::numeric_limits<double>::infinity());
      if (f <= 0.0) break;
      total += f;
    }
  }
  // The final failed BFS leaves exactly the residual-reachable set labelled.
  reachable_.assign(static_cast<size_t>(node_count_), false);
  for (int u : queue_) reachable_[u] = true;
  return total;
}

BkGraph::BkGraph(int node_count) { reset(node_count); }

void BkGraph::reset(int node_count) {
  nodes_.assign(static_cast<size_t>(node_count), Node{});
  arcs_.clear();
  queue_.clear();
  queue_head_ = 0;
  orphans_.clear();
  flow_ = 0.0;
  time_ = 0;
}

void BkGraph::add_tweights(int i, double cap_source, double cap_sink) {
  const double delta = nodes_[i].tr_cap;
  if (delta > 0.0) {
    cap_source += delta;
  } else {
    cap_sink -= delta;
  }
  flow_ += std::min(cap_source, cap_sink);
  nodes_[i].tr_cap = cap_source - cap_sink;
}

void BkGraph::add_edge(int i, int j, double cap, double rev_cap) {
  const int a = static_cast<int>(arcs_.size());
  arcs_.push_back({j, nodes_[i].first, cap});
  nodes_[i].first = a;
  arcs_.push_back({i, nodes_[j].first, rev_cap});
  nodes_[j].first = a + 1;
}

void BkGraph::set_active(int i) {
  if (nodes_[i].active) return;
  nodes_[i].active = true;
  queue_.push_back(i);
}

int BkGraph::next_active() {
  while (queue_head_ < queue_.size()) {
    const int i = queue_[queue_head_++];
    nodes_[i].active = false;
    if (nodes_[i].parent != kNone) return i;
  }
  queue_.clear();
  queue_head_ = 0;
  return kNone;
}

void BkGraph::augment(int middle) {
  double bottleneck = arcs_[middle].r_cap;
  int i = arcs_[sister(middle)].head;
  for (; nodes_[i].parent != kTerminal; i = arcs_[nodes_[i].parent].head) {
    bottleneck = std::min(bottleneck, arcs_[sister(nodes_[i].parent)].r_cap);
  }
  bottleneck = std::min(bottleneck, nodes_[i].tr_cap);
  i = arcs_[middle].head;
  for (; nodes_[i].parent != kTerminal; i = arcs_[nodes_[i].parent].head) {
    bottleneck = std::min(bottleneck, arcs_[nodes_[i].parent].r_cap);
  }
  bottleneck = std::min(bottleneck, -nodes_[i].tr_cap);

  arcs_[middle].r_cap -= bottleneck;
  arcs_[sister(middle)].r_cap += bottleneck;
  auto orphan = [&](int n) {
    nodes_[n].parent = kOrphan;
    orphans_.push_back(n);
  };
  for (i = arcs_[sister(middle)].head;; ) {
    const int a = nodes_[i].parent;
    if (a == kTerminal) break;
    arcs_[a].r_cap += bottleneck;
    arcs_[sister(a)].r_cap -= bottleneck;
    const int up = arcs_[a].head;
    if (arcs_[sister(a)].r_cap == 0.0) orphan(i);
    i = up;
  }
  nodes_[i].tr_cap -= bottleneck;
  if (nodes_[i].tr_cap == 0.0) orphan(i);
  for (i = arcs_[middle].head;; ) {
    const int a = nodes_[i].parent;
    if (a == kTerminal) break;
    arcs_[sister(a)].r_cap += bottleneck;
    arcs_[a].r_cap -= bottleneck;
    const int up = arcs_[a].head;
    if (arcs_[a].r_cap == 0.0) orphan(i);
    i = up;
  }
  nodes_[i].tr_cap += bottleneck;
  if (nodes_[i].tr_cap == 0.0) orphan(i);
  flow_ += bottleneck;
}

void BkGraph::process_source_orphan(int i) {
  int best_arc = kNone;
  int best_dist = kInfDist;
  for (int a0 = nodes_[i].first; a0 != kNone; a0 = arcs_[a0].next) {
    if (arcs_[sister(a0)].r_cap == 0.0) continue;
    int j = arcs_[a0].head;
    if (nodes_[j].sink || nodes_[j].parent == kNone) continue;
    int d = 0;
    while (true) {
      if (nodes_[j].ts == time_) {
        d += nodes_[j].dist;
        break;
      }
      const int a = nodes_[j].parent;
      ++d;
      if (a == kTerminal) {
        nodes_[j].ts = time_;
        nodes_[j].dist = 1;
        break;
      }
      if (a == kOrphan) {
        d = kInfDist;
        break;
      }
      j = arcs_[a].head;
    }
    if (d == kInfDist) continue;
    if (d < best_dist) {
      best_arc = a0;
      best_dist = d;
    }
    for (j = arcs_[a0].head; nodes_[j].ts != time_; j = arcs_[nodes_[j].parent].head) {
      nodes_[j].ts = time_;
      nodes_[j].dist = d--;
    }
  }
  nodes_[i].parent = best_arc;
  if (best_arc != kNone) {
    nodes_[i].ts = time_;
    nodes_[i].dist = best_dist + 1;
    return;
  }
  for (int a0 = nodes_[i].first; a0 != kNone; a0 = arcs_[a0].next) {
    const int j = arcs_[a0].head;
    const int a = nodes_[j].parent;
    if (nodes_[j].sink || a == kNone) continue;
    if (arcs_[sister(a0)].r_cap > 0.0) set_active(j);
    if (a != kTerminal && a != kOrphan && arcs_[a].head == i) {
      nodes_[j].parent = kOrphan;
      orphans_.push_back(j);
    }
  }
}

void BkGraph::process_sink_orphan(int i) {
  int best_arc = kNone;
  int best_dist = kInfDist;
  for (int a0 = nodes_[i].first; a0 != kNone; a0 = arcs_[a0].next) {
    if (arcs_[a0].r_cap == 0.0) continue;
    int j = arcs_[a0].head;
    if (!nodes_[j].sink || nodes_[j].parent == kNone) continue;
    int d = 0;
    while (true) {
      if (nodes_[j].ts == time_) {
        d += nodes_[j].dist;
        break;
      }
      const int a = nodes_[j].parent;
      ++d;
      if (a == kTerminal) {
        nodes_[j].ts = time_;
        nodes_[j].dist = 1;
        break;
      }
      if (a == kOrphan) {
        d = kInfDist;
        break;
      }
      j = arcs_[a].head;
    }
    if (d == kInfDist) continue;
    if (d < best_dist) {
      best_arc = a0;
      best_dist = d;
    }
    for (j = arcs_[a0].head; nodes_[j].ts != time_; j = arcs_[nodes_[j].parent].head) {
      nodes_[j].ts = time_;
      nodes_[j].dist = d--;
    }
  }
  nodes_[i].parent = best_arc;
  if (best_arc != kNone) {
    nodes_[i].ts = time_;
    nodes_[i].dist = best_dist + 1;
    return;
  }
  for (int a0 = nodes_[i].first; a0 != kNone; a0 = arcs_[a0].next) {
    const int j = arcs_[a0].head;
    const int a = nodes_[j].parent;
    if (!nodes_[j].sink || a == kNone) continue;
    if (arcs_[a0].r_cap > 0.0) set_active(j);
    if (a != kTerminal && a != kOrphan && arcs_[a].head == i) {
      nodes_[j].parent = kOrphan;
      orphans_.push_back(j);
    }
  }
}

double BkGraph::max_flow() {
  queue_.clear();
  queue_head_ = 0;
  orphans_.clear();
  time_ = 0;
  for (int i = 0; i < node_count(); ++i) {
    Node& n = nodes_[i];
    n.active = false;
    n.ts = 0;
    if (n.tr_cap > 0.0) {
      n.sink = false;
      n.parent = kTerminal;
      n.dist = 1;
      set_active(i);
    } else if (n.tr_cap < 0.0) {
      n.sink = true;
      n.parent = kTerminal;
      n.dist = 1;
      set_active(i);
    } else {
      n.parent = kNone;
    }
  }

  int current = kNone;
  while (true) {
    int i = current;
    if (i != kNone) {
      nodes_[i].active = false;
      if (nodes_[i].parent == kNone) i = kNone;
    }
    if (i == kNone) {
      i = next_active();
      if (i == kNone) break;
    }

    int middle = kNone;
    if (!nodes_[i].sink) {
      for (int a = nodes_[i].first; a != kNone; a = arcs_[a].next) {
        if (arcs_[a].r_cap == 0.0) continue;
        const int j = arcs_[a].head;
        Node& nj = nodes_[j];
        if (nj.parent == kNone) {
          nj.sink = false;
          nj.parent = sister(a);
          nj.ts = nodes_[i].ts;
          nj.dist = nodes_[i].dist + 1;
          set_active(j);
        } else if (nj.sink) {
          middle = a;
          break;
        } else if (nj.ts <= nodes_[i].ts && nj.dist > nodes_[i].dist) {
          nj.parent = sister(a);
          nj.ts = nodes_[i].ts;
          nj.dist = nodes_[i].dist + 1;
        }
      }
    } else {
      for (int a = nodes_[i].first; a != kNone; a = arcs_[a].next) {
        if (arcs_[sister(a)].r_cap == 0.0) continue;
        const int j = arcs_[a].head;
        Node& nj = nodes_[j];
        if (nj.parent == kNone) {
          nj.sink = true;
          nj.parent = sister(a);
          nj.ts = nodes_[i].ts;
          nj.dist = nodes_[i].dist + 1;
          set_active(j);
        } else if (!nj.sink) {
          middle = sister(a);
          break;
        } else if (nj.ts <= nodes_[i].ts && nj.dist > nodes_[i].dist) {
          nj.parent = sister(a);
          nj.ts = nodes_[i].ts;
          nj.dist = nodes_[i].dist + 1;
        }
      }
    }

    ++time_;
    if (middle == kNone) {
      current = kNone;
      continue;
    }
    // Keep growing from i after the augmentation.
    nodes_[i].active = true;
    current = i;
    augment(middle);
    for (size_t k = 0; k < orphans_.size(); ++k) {
      const int o = orphans_[k];
      if (nodes_[o].sink) {
        process_sink_orphan(o);
      } else {
        process_source_orphan(o);
      }
    }
    orphans_.clear();
  }
  return flow_;
}

bool BkGraph::source_side(int i) const { return nodes_[i].parent != kNone && !nodes_[i].sink; }

MinCut max_flow_min_cut(const FlowNetwork& network, FlowAlgorithm algorithm) {
  const int n = network.node_count;
  if (network.source < 0 || network.sink < 0 || network.source >= n || network.sink >= n ||
      network.source == network.sink) {
    throw InvalidInput("invalid source/sink for max-flow");
  }
  for (const FlowArc& a : network.arcs) {
    if (a.from < 0 || a.to < 0 || a.from >= n || a.to >= n) {
      throw InvalidInput("flow arc references an invalid node");
    }
    if (!(a.capacity >= 0.0) || !std::isfinite(a.capacity)) {
      throw InvalidInput("flow capacities must be finite and >= 0");
    }
  }
  MinCut cut;
  if (algorithm == FlowAlgorithm::dinic) {
    FlowGraph graph(n);
    for (const FlowArc& a : network.arcs) graph.add_edge(a.from, a.to, a.capacity);
    cut.flow = graph.max_flow(network.source, network.sink);
    cut.source_side = graph.source_side();
    return cut;
  }

  // Terminals become implicit: arcs into the source or out of the sink never carry flow.
  BkGraph graph(n);
  double direct = 0.0;
  for (const FlowArc& a : network.arcs) {
    const bool from_s = a.from == network.source;
    const bool to_t = a.to == network.sink;
    if (a.from == a.to || a.to == network.source || a.from == network.sink) continue;
    if (from_s && to_t) {
      direct += a.capacity;
    } else if (from_s) {
      graph.add_tweights(a.to, a.capacity, 0.0);
    } else if (to_t) {
      graph.add_tweights(a.from, 0.0, a.capacity);
    } else {
      graph.add_edge(a.from, a.to, a.capacity);
    }
  }
  cut.flow = graph.max_flow() + direct;
  cut.source_side.assign(static_cast<size_t>(n), false);
  for (int i = 0; i < n; ++i) cut.source_side[i] = graph.source_side(i);
  cut.source_side[network.source] = true;
  cut.source_side[network.sink] = false;
  return cut;
}

}  // namespace mrfc
