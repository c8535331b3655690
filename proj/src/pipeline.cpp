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

#include "mrfc/pipeline.hpp"

#include <cmath>
#include <functional>
#include <ostream>

#include "mrfc/error.hpp"

namespace mrfc {

namespace {

using Clock = std::chrono::steady_clock;
using ScaleObserver = std::function<void(const Pyramid&, int scale, const Solution& x)>;

Pyramid make_pyramid(const Model& model, const PipelineConfig& cfg) {
  if (!cfg.groupings.empty()) return build_pyramid(model, cfg.groupings);
  return build_pyramid(model, cfg.num_scales);
}

ScaleRecord record_solve(int scale, const Model& m, const PruningMatrix& a, const Solution& init, const SolveResult& r,
                         bool keep_solutions) {
  ScaleRecord rec;
  rec.scale = scale;
  rec.node_count = m.node_count();
  rec.energy_before = r.energy_trace.front();
  rec.energy_after = r.energy.total;
  rec.active_labels = a.active_count();
  rec.active_ratio = a.active_ratio();
  rec.solve_time = r.wall_time;
  rec.solver_iterations = r.iterations;
  if (keep_solutions) {
    rec.initial = init;
    rec.solution = r.x;
  }
  return rec;
}

// Coarse-to-fine loop over an existing pyramid. `cascade` null means no pruning.
PipelineResult run_multiscale(const Pyramid& pyr, const PipelineConfig& cfg, const CascadeModel* cascade,
                              const ScaleObserver& observe) {
  PipelineResult out;
  int s = pyr.coarsest();
  PruningMatrix a = PruningMatrix::all_active(pyr.models[s].node_count(), pyr.models[s].label_count());
  Solution x = unary_argmin(pyr.models[s]);
  for (;; --s) {
    const Model& m = pyr.models[s];
    SolveResult r = solve(m, a, x, cfg.solver);
    out.trace.push_back(record_solve(s, m, a, x, r, cfg.record_solutions));
    out.pruning.insert_or_assign(s, a);
    x = std::move(r.x);
    if (observe) observe(pyr, s, x);
    if (s == 0) break;

    const GroupingFunction& g = pyr.groupings[s - 1];
    Solution next = upsample(x, g);
    if (cascade) {
      const FeatureMap z = compute_features(pyr, s, x, cfg.rho_factor);
      a = build_pruning_matrix(cascade->at(s), z, g, next);
    } else {
      a = PruningMatrix::all_active(pyr.models[s - 1].node_count(), pyr.models[s - 1].label_count());
    }
    x = std::move(next);
  }
  out.x = std::move(x);
  out.energy = energy(pyr.models[0], out.x);
  return out;
}

}  // namespace

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::direct: return "direct";
    case Strategy::multiscale: return "multiscale";
    case Strategy::pruning: return "pruning";
  }
  return "?";
}

Strategy strategy_from_name(const std::string& name) {
  if (name == "direct") return Strategy::direct;
  if (name == "multiscale") return Strategy::multiscale;
  if (name == "pruning") return Strategy::pruning;
  throw ConfigError("unknown strategy '" + name + "'");
}

PipelineResult run(const Model& model, const PipelineConfig& cfg, const CascadeModel* cascade) {
  const auto t0 = Clock::now();
  const bool prune = cfg.strategy == Strategy::pruning && !std::isinf(cfg.lambda);
  if (prune && cascade == nullptr) throw ConfigError("pruning strategy needs a trained cascade");
  if (cfg.num_scales < 1) throw ConfigError("num_scales must be >= 1");

  PipelineResult out;
  if (cfg.strategy == Strategy::direct) {
    const Solution init = cfg.direct_init ? *cfg.direct_init : unary_argmin(model);
    const PruningMatrix a = PruningMatrix::all_active(model.node_count(), model.label_count());
    SolveResult r = solve(model, a, init, cfg.solver);
    out.trace.push_back(record_solve(0, model, a, init, r, cfg.record_solutions));
    out.pruning.insert_or_assign(0, a);
    out.x = std::move(r.x);
    out.energy = r.energy;
  } else {
    const Pyramid pyr = make_pyramid(model, cfg);
    if (prune) {
      for (int s = 1; s <= pyr.coarsest(); ++s) cascade->at(s);
    }
    out = run_multiscale(pyr, cfg, prune ? cascade : nullptr, {});
  }
  out.wall_time = Clock::now() - t0;
  return out;
}

XMapPyramid build_xmap_pyramid(const Solution& ground_truth, const Pyramid& pyramid) {
  const Model& finest = pyramid.models[0];
  validate_solution(finest, ground_truth);
  XMapPyramid xmap;
  LabelMask base = LabelMask::Constant(finest.node_count(), finest.label_count(), false);
  for (int i = 0; i < finest.node_count(); ++i) base(i, ground_truth[i]) = true;
  xmap.push_back(std::move(base));
  for (int s = 1; s < pyramid.depth(); ++s) {
    const GroupingFunction& g = pyramid.groupings[s - 1];
    LabelMask next = LabelMask::Constant(g.coarse_count(), finest.label_count(), false);
    const LabelMask& prev = xmap.back();
    for (int i = 0; i < g.fine_count(); ++i) next.row(g.parent(i)) = next.row(g.parent(i)) || prev.row(i);
    xmap.push_back(std::move(next));
  }
  return xmap;
}

std::size_t TrainingSet::size() const {
  std::size_t n = 0;
  for (const auto& [s, groups] : samples) n += groups[0].size() + groups[1].size();
  return n;
}

GroupCounts TrainingSet::counts(int scale, int group) const {
  GroupCounts c;
  auto it = samples.find(scale);
  if (it == samples.end()) return c;
  for (const TrainingSample& t : it->second[group]) (t.target ? c.c1 : c.c0) += 1;
  return c;
}

TrainingSet collect_training_data(const std::vector<TrainingInstance>& instances, const PipelineConfig& cfg) {
  TrainingSet set;
  for (const TrainingInstance& inst : instances) {
    validate_solution(inst.model, inst.ground_truth);
    const Pyramid pyr = make_pyramid(inst.model, cfg);
    const XMapPyramid xmap = build_xmap_pyramid(inst.ground_truth, pyr);
    auto observe = [&](const Pyramid& p, int s, const Solution& x) {
      if (s < 1) return;
      const FeatureMap z = compute_features(p, s, x, cfg.rho_factor);
      auto& groups = set.samples[s];
      for (int i = 0; i < z.node_count(); ++i) {
        const int group = z.psd(i, 0) ? 1 : 0;
        for (int l = 0; l < z.label_count(); ++l) {
          groups[group].push_back({z.lev(i, l), z.uc(i, l), static_cast<std::uint8_t>(xmap[s](i, l)), i, l});
        }
      }
    };
    run_multiscale(pyr, cfg, nullptr, observe);
  }
  return set;
}

void write_training_csv(const TrainingSet& set, std::ostream& out) {
  out << "scale,node,label,psd,lev,uc,target\n";
  const auto old = out.precision(17);
  for (const auto& [s, groups] : set.samples) {
    for (int g = 0; g < 2; ++g) {
      for (const TrainingSample& t : groups[g]) {
        out << s << ',' << t.node << ',' << t.label << ',' << g << ',' << t.lev << ',' << t.uc << ','
            << static_cast<int>(t.target) << '\n';
      }
    }
  }
  out.precision(old);
}

CascadeModel train_cascade(const TrainingSet& training, double lambda, double C) {
  if (training.size() == 0) throw InvalidInput("training set is empty");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidInput("lambda must be positive and finite");
  CascadeModel cascade;
  cascade.lambda = lambda;
  cascade.C = C;
  for (const auto& [s, groups] : training.samples) {
    ScaleClassifier sc;
    sc.scale = s;
    for (int g = 0; g < 2; ++g) {
      const GroupCounts counts = training.counts(s, g);
      sc.counts[g] = counts;
      LinearClassifier& clf = g == 0 ? sc.psd0 : sc.psd1;
      if (counts.c0 == 0 || counts.c1 == 0) {
        clf = LinearClassifier::always_keep();
        sc.fallback[g] = true;
        continue;
      }
      std::vector<FeatureVector> z;
      std::vector<std::uint8_t> y;
      z.reserve(groups[g].size());
      y.reserve(groups[g].size());
      for (const TrainingSample& t : groups[g]) {
        z.emplace_back(t.lev, t.uc);
        y.push_back(t.target);
      }
      SvmOptions opt;
      opt.C = C;
      opt.weight_c0 = 1.0;
      opt.weight_c1 = lambda * static_cast<double>(counts.c0) / static_cast<double>(counts.c1);
      sc.weight_c1[g] = opt.weight_c1;
      clf = train_weighted_linear_svm(z, y, opt);
    }
    cascade.scales.emplace(s, sc);
  }
  return cascade;
}

}  // namespace mrfc
