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

#include "mrfc/features.hpp"

#include "mrfc/error.hpp"

namespace mrfc {

namespace {

constexpr double kNormalizationEpsilon = 1e-12;

void divide_by_abs_mean(FeatureArray& values) {
  if (values.size() == 0) return;
  double sum = 0.0;
  for (Eigen::Index k = 0; k < values.size(); ++k) sum += std::abs(values.data()[k]);
  const double mean = sum / static_cast<double>(values.size());
  if (mean < kNormalizationEpsilon) return;
  values /= mean;
}

}  // namespace

double mean_edge_weight(const Model& model) {
  if (model.edge_count() == 0) return 0.0;
  double sum = 0.0;
  for (const Edge& e : model.edges()) sum += e.potential.nominal_weight();
  return sum / static_cast<double>(model.edge_count());
}

DiscontinuityThreshold discontinuity_threshold(const Model& model, double rho_factor) {
  DiscontinuityThreshold t;
  t.rho_factor = rho_factor;
  t.mean_edge_weight = mean_edge_weight(model);
  t.rho = rho_factor * t.mean_edge_weight;
  return t;
}

LabelMask compute_psd(const Model& model, const Solution& x, double rho) {
  validate_solution(model, x);
  std::vector<bool> strong(static_cast<size_t>(model.node_count()), false);
  const double threshold = rho + 1e-12 * std::abs(rho);
  for (const Edge& e : model.edges()) {
    if (e.potential(x[e.i], x[e.j]) > threshold) {
      strong[e.i] = true;
      strong[e.j] = true;
    }
  }
  LabelMask psd(model.node_count(), model.label_count());
  for (int i = 0; i < model.node_count(); ++i) psd.row(i).setConstant(strong[i]);
  return psd;
}

FeatureArray compute_lev(const Model& model, const Solution& x, const GroupingFunction& g,
                         const EdgePartition& partition) {
  validate_solution(model, x);
  if (g.coarse_count() != model.node_count() ||
      static_cast<int>(partition.coarse_edges.size()) != model.edge_count()) {
    throw InvalidInput("grouping metadata does not describe this scale");
  }
  const int labels = model.label_count();
  FeatureArray lev(model.node_count(), labels);
  for (int i = 0; i < model.node_count(); ++i) {
    const double nv = g.group_size(i);
    const double base = model.unary(i, x[i]);
    for (int l = 0; l < labels; ++l) {
      double v = (model.unary(i, l) - base) / nv;
      for (const Incidence& inc : model.incident(i)) {
        const double ne = partition.crossing_count(inc.edge);
        const int xj = x[inc.other];
        v += (model.pairwise_from(inc, l, xj) - model.pairwise_from(inc, x[i], xj)) / ne;
      }
      lev(i, l) = v;
    }
  }
  return lev;
}

FeatureArray compute_uc(const Model& coarse, const Model& fine, const GroupingFunction& g) {
  if (g.coarse_count() != coarse.node_count() || g.fine_count() != fine.node_count() ||
      coarse.label_count() != fine.label_count()) {
    throw InvalidInput("grouping does not connect these two scales");
  }
  const int labels = coarse.label_count();
  FeatureArray uc = FeatureArray::Zero(coarse.node_count(), labels);
  for (int i = 0; i < coarse.node_count(); ++i) {
    const double nv = g.group_size(i);
    for (int l = 0; l < labels; ++l) {
      const double share = coarse.unary(i, l) / nv;
      double sum = 0.0;
      for (int child : g.children(i)) sum += std::abs(fine.unary(child, l) - share);
      uc(i, l) = sum / nv;
    }
  }
  return uc;
}

FeatureMap normalize(FeatureMap features) {
  if (features.normalized) throw StateError("feature map is already normalized");
  divide_by_abs_mean(features.lev);
  divide_by_abs_mean(features.uc);
  features.normalized = true;
  return features;
}

FeatureMap compute_features(const Pyramid& pyramid, int scale, const Solution& x, double rho_factor) {
  if (scale < 1 || scale >= pyramid.depth()) {
    throw InvalidInput("features are defined for scales 1.." + std::to_string(pyramid.coarsest()));
  }
  const Model& model = pyramid.models[scale];
  const GroupingFunction& g = pyramid.groupings[scale - 1];
  FeatureMap f;
  f.scale = scale;
  f.psd = compute_psd(model, x, discontinuity_threshold(model, rho_factor).rho);
  f.lev = compute_lev(model, x, g, pyramid.partitions[scale - 1]);
  f.uc = compute_uc(model, pyramid.models[scale - 1], g);
  return normalize(std::move(f));
}

}  // namespace mrfc
