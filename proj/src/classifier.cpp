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

#include "mrfc/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <fstream>

#include "mrfc/error.hpp"

namespace mrfc {

namespace {

constexpr int kCascadeVersion = 1;

nlohmann::json lambda_to_json(double lambda) {
  if (std::isinf(lambda)) return "inf";
  return lambda;
}

double lambda_from_json(const nlohmann::json& j) {
  if (j.is_string() && j.get<std::string>() == "inf") return kNoPruning;
  if (!j.is_number()) throw ParseError("cascade: 'lambda' must be a number or \"inf\"");
  return j.get<double>();
}

nlohmann::json classifier_to_json(const LinearClassifier& c) {
  return {{"w", {c.w[0], c.w[1]}}, {"b", c.bias}};
}

const nlohmann::json& member(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ParseError("cascade: missing '" + std::string(key) + "' at " + where);
  return j.at(key);
}

double number(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError("cascade: expected a number at " + where);
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError("cascade: non-finite value at " + where);
  return v;
}

LinearClassifier classifier_from_json(const nlohmann::json& j, const std::string& where) {
  const auto& w = member(j, "w", where);
  if (!w.is_array() || w.size() != kFeatureDim) {
    throw ParseError("cascade: feature dimension mismatch at " + where + ".w (expected " +
                     std::to_string(kFeatureDim) + ")");
  }
  LinearClassifier c;
  c.w[0] = number(w[0], where + ".w[0]");
  c.w[1] = number(w[1], where + ".w[1]");
  c.bias = number(member(j, "b", where), where + ".b");
  return c;
}

}  // namespace

const ScaleClassifier& CascadeModel::at(int scale) const {
  auto it = scales.find(scale);
  if (it == scales.end()) throw ConfigError("cascade has no classifier for scale " + std::to_string(scale));
  return it->second;
}

LinearClassifier train_weighted_linear_svm(const std::vector<FeatureVector>& samples,
                                           const std::vector<std::uint8_t>& targets,
                                           const SvmOptions& options) {
  if (samples.size() != targets.size()) throw InvalidInput("samples and targets differ in length");
  if (!(options.C > 0.0) || !(options.weight_c0 > 0.0) || !(options.weight_c1 > 0.0)) {
    throw InvalidInput("C and class weights must be positive");
  }
  bool has0 = false;
  bool has1 = false;
  for (auto t : targets) {
    if (t > 1) throw InvalidInput("targets must be 0 or 1");
    (t ? has1 : has0) = true;
  }
  if (!has0 || !has1) throw DegenerateTraining("training set contains a single class");

  const size_t n = samples.size();
  Eigen::Matrix<double, Eigen::Dynamic, 3> x(static_cast<Eigen::Index>(n), 3);
  Eigen::VectorXd cost(static_cast<Eigen::Index>(n));
  for (size_t k = 0; k < n; ++k) {
    const double y = targets[k] ? 1.0 : -1.0;
    const auto r = static_cast<Eigen::Index>(k);
    x.row(r) << y * samples[k][0], y * samples[k][1], y;
    cost[r] = options.C * (targets[k] ? options.weight_c1 : options.weight_c0);
  }

  // Smoothed hinge: zero below 0, t^2 / 2h on (0, h), t - h/2 above.
  auto objective = [&](const Eigen::Vector3d& theta, double h) {
    const Eigen::VectorXd t = 1.0 - (x * theta).array();
    double f = 0.5 * theta.head<2>().squaredNorm();
    for (Eigen::Index k = 0; k < t.size(); ++k) {
      if (t[k] >= h) {
        f += cost[k] * (t[k] - 0.5 * h);
      } else if (t[k] > 0.0) {
        f += cost[k] * t[k] * t[k] / (2.0 * h);
      }
    }
    return f;
  };
  auto exact = [&](const Eigen::Vector3d& theta) { return objective(theta, 0.0); };

  Eigen::Vector3d theta = Eigen::Vector3d::Zero();
  Eigen::Vector3d best = theta;
  double best_value = exact(theta);
  const double grad_scale = 1.0 + cost.sum();
  double radius = 1.0;

  for (double h = 1.0; h >= options.smoothing_floor; h *= 0.1) {
    for (int it = 0; it < options.max_newton_steps; ++it) {
      const Eigen::VectorXd t = 1.0 - (x * theta).array();
      Eigen::Vector3d grad(theta[0], theta[1], 0.0);
      Eigen::Matrix3d hess = Eigen::Vector3d(1.0, 1.0, 0.0).asDiagonal();
      for (Eigen::Index k = 0; k < t.size(); ++k) {
        if (t[k] >= h) {
          grad -= cost[k] * x.row(k).transpose();
        } else if (t[k] > 0.0) {
          grad -= cost[k] * (t[k] / h) * x.row(k).transpose();
          hess += (cost[k] / h) * x.row(k).transpose() * x.row(k);
        }
      }
      if (grad.lpNorm<Eigen::Infinity>() <= options.tolerance * grad_scale) break;
      hess(2, 2) += 1e-9 * (1.0 + hess.trace());
      const Eigen::Vector3d step = -hess.ldlt().solve(grad);
      const double f0 = objective(theta, h);
      const double slope = grad.dot(step);
      if (!(slope < 0.0)) break;
      // Near-singular Hessians give huge steps; cap the length adaptively.
      const double length = step.norm();
      double eta = std::min(1.0, radius / length);
      bool accepted = false;
      for (int bt = 0; bt < 80; ++bt, eta *= 0.5) {
        const Eigen::Vector3d trial = theta + eta * step;
        if (objective(trial, h) <= f0 + 1e-4 * eta * slope) {
          theta = trial;
          radius = bt == 0 ? std::max(radius, 2.0 * eta * length) : eta * length;
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
    }
    const double value = exact(theta);
    if (value < best_value) {
      best_value = value;
      best = theta;
    }
  }
  // Smoothing leaves support vectors a hair inside the margin. Rescaling puts
  // them exactly on it; kept only if the exact objective does not increase.
  const Eigen::VectorXd margins = x * best;
  double lowest = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < margins.size(); ++k) {
    if (margins[k] >= 1.0 - 1e-6 && margins[k] < 1.0) lowest = std::min(lowest, margins[k]);
  }
  if (std::isfinite(lowest)) {
    double scale = 1.0 / lowest;
    for (int bump = 0; bump < 8; ++bump) {
      const LinearClassifier c{best.head<2>() * scale, best[2] * scale};
      bool below = false;
      for (size_t k = 0; k < n && !below; ++k) {
        const double y = targets[k] ? 1.0 : -1.0;
        below = margins[static_cast<Eigen::Index>(k)] >= 1.0 - 1e-6 && y * c.margin(samples[k]) < 1.0;
      }
      if (!below) break;
      scale = std::nextafter(scale, 2.0 * scale);
    }
    const Eigen::Vector3d snapped = best * scale;
    if (exact(snapped) <= best_value) best = snapped;
  }
  const Eigen::Vector3d& w = best;

  LinearClassifier clf;
  clf.w = w.head<2>();
  clf.bias = w[2];
  if (!clf.w.allFinite() || !std::isfinite(clf.bias)) throw DegenerateTraining("SVM diverged");
  return clf;
}

double hinge_loss(const LinearClassifier& clf, const std::vector<FeatureVector>& samples,
                  const std::vector<std::uint8_t>& targets) {
  double loss = 0.0;
  for (size_t k = 0; k < samples.size(); ++k) {
    const double y = targets[k] ? 1.0 : -1.0;
    loss += std::max(0.0, 1.0 - y * clf.margin(samples[k]));
  }
  return loss;
}

bool predict(const ScaleClassifier& sc, bool psd, double lev, double uc) {
  const LinearClassifier& clf = psd ? sc.psd1 : sc.psd0;
  return clf.keep(FeatureVector(lev, uc));
}

PruningMatrix build_pruning_matrix(const ScaleClassifier& sc, const FeatureMap& features,
                                   const GroupingFunction& g, const Solution& warm_start) {
  if (!features.normalized) throw StateError("pruning needs normalized features");
  if (g.coarse_count() != features.node_count()) {
    throw InvalidInput("grouping does not map onto the feature map's scale");
  }
  if (static_cast<int>(warm_start.size()) != g.fine_count()) {
    throw InvalidInput("warm start does not match the finer scale");
  }
  const int labels = features.label_count();

  // Decisions depend only on the parent, so evaluate once per coarse node.
  LabelMask coarse(features.node_count(), labels);
  for (int c = 0; c < features.node_count(); ++c) {
    for (int l = 0; l < labels; ++l) {
      coarse(c, l) = predict(sc, features.psd(c, l), features.lev(c, l), features.uc(c, l));
    }
  }
  LabelMask fine(g.fine_count(), labels);
  for (int i = 0; i < g.fine_count(); ++i) {
    fine.row(i) = coarse.row(g.parent(i));
    const int x = warm_start[i];
    if (x < 0 || x >= labels) throw InvalidInput("warm start label out of range");
    fine(i, x) = true;
  }
  return PruningMatrix(std::move(fine));
}

nlohmann::json cascade_to_json(const CascadeModel& cascade) {
  nlohmann::json scales = nlohmann::json::array();
  for (const auto& [s, sc] : cascade.scales) {
    nlohmann::json entry;
    entry["scale"] = s;
    entry["psd0"] = classifier_to_json(sc.psd0);
    entry["psd1"] = classifier_to_json(sc.psd1);
    entry["counts"] = {{"c0", sc.counts[0].c0 + sc.counts[1].c0}, {"c1", sc.counts[0].c1 + sc.counts[1].c1}};
    entry["group_counts"] = {{{"c0", sc.counts[0].c0}, {"c1", sc.counts[0].c1}},
                             {{"c0", sc.counts[1].c0}, {"c1", sc.counts[1].c1}}};
    entry["fallback"] = {sc.fallback[0], sc.fallback[1]};
    entry["weight_c1"] = {sc.weight_c1[0], sc.weight_c1[1]};
    scales.push_back(std::move(entry));
  }
  return {{"version", kCascadeVersion},
          {"feature_dim", kFeatureDim},
          {"C", cascade.C},
          {"lambda", lambda_to_json(cascade.lambda)},
          {"scales", std::move(scales)}};
}

namespace {

CascadeModel parse_cascade(const nlohmann::json& j) {
  const auto version = member(j, "version", "$");
  if (!version.is_number_integer() || version.get<int>() != kCascadeVersion) {
    throw ParseError("cascade: unsupported version at $.version");
  }
  if (j.contains("feature_dim") && j.at("feature_dim") != kFeatureDim) {
    throw ParseError("cascade: feature dimension mismatch at $.feature_dim");
  }
  CascadeModel cascade;
  cascade.C = number(member(j, "C", "$"), "$.C");
  cascade.lambda = lambda_from_json(member(j, "lambda", "$"));
  const auto& scales = member(j, "scales", "$");
  if (!scales.is_array() || scales.empty()) throw ParseError("cascade: '$.scales' must be a non-empty array");
  for (size_t k = 0; k < scales.size(); ++k) {
    const std::string where = "$.scales[" + std::to_string(k) + "]";
    const auto& entry = scales[k];
    const auto& s = member(entry, "scale", where);
    if (!s.is_number_integer() || s.get<int>() < 1) throw ParseError("cascade: scale must be >= 1 at " + where);
    ScaleClassifier sc;
    sc.scale = s.get<int>();
    sc.psd0 = classifier_from_json(member(entry, "psd0", where), where + ".psd0");
    sc.psd1 = classifier_from_json(member(entry, "psd1", where), where + ".psd1");
    if (entry.contains("group_counts")) {
      const auto& gc = entry.at("group_counts");
      if (!gc.is_array() || gc.size() != 2) throw ParseError("cascade: bad group_counts at " + where);
      for (int g = 0; g < 2; ++g) {
        sc.counts[g].c0 = member(gc[g], "c0", where).get<long>();
        sc.counts[g].c1 = member(gc[g], "c1", where).get<long>();
      }
    }
    if (entry.contains("fallback")) {
      const auto& fb = entry.at("fallback");
      if (!fb.is_array() || fb.size() != 2) throw ParseError("cascade: bad fallback at " + where);
      sc.fallback = {fb[0].get<bool>(), fb[1].get<bool>()};
    }
    if (entry.contains("weight_c1")) {
      const auto& wc = entry.at("weight_c1");
      if (!wc.is_array() || wc.size() != 2) throw ParseError("cascade: bad weight_c1 at " + where);
      sc.weight_c1 = {number(wc[0], where + ".weight_c1[0]"), number(wc[1], where + ".weight_c1[1]")};
    }
    if (!cascade.scales.emplace(sc.scale, sc).second) {
      throw ParseError("cascade: duplicate scale " + std::to_string(sc.scale) + " at " + where);
    }
  }
  // Scales must be contiguous from 1 so every coarse-to-fine step has a classifier.
  int expected = 1;
  for (const auto& [s, sc] : cascade.scales) {
    if (s != expected) throw ParseError("cascade: missing scale entry " + std::to_string(expected));
    ++expected;
  }
  return cascade;
}

}  // namespace

CascadeModel cascade_from_json(const nlohmann::json& j) {
  try {
    return parse_cascade(j);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("cascade: ") + e.what());
  }
}

void save_cascade(const CascadeModel& cascade, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << cascade_to_json(cascade).dump(2) << '\n';
}

CascadeModel load_cascade(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return cascade_from_json(j);
}

}  // namespace mrfc
