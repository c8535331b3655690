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

#include "mrfc/io.hpp"

#include <fstream>

#include "mrfc/error.hpp"

namespace mrfc {

namespace {

const nlohmann::json& field(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ParseError("missing '" + std::string(key) + "' at " + where);
  return j.at(key);
}

double real(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError("expected a number at " + where);
  return j.get<double>();
}

int integer(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ParseError("expected an integer at " + where);
  return j.get<int>();
}

nlohmann::json potential_to_json(const PairwisePotential& p) {
  if (p.is_dense()) {
    const DenseTable& t = p.table();
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index a = 0; a < t.rows(); ++a) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index b = 0; b < t.cols(); ++b) row.push_back(t(a, b));
      rows.push_back(std::move(row));
    }
    return {{"kind", "dense"}, {"table", std::move(rows)}};
  }
  return {{"kind", kernel_name(p.kernel())}, {"weight", p.weight()}, {"trunc", p.trunc()}};
}

PairwisePotential potential_from_json(const nlohmann::json& j, const std::string& where) {
  const auto& kind = field(j, "kind", where);
  if (!kind.is_string()) throw ParseError("expected a string at " + where + ".kind");
  Kernel k;
  try {
    k = kernel_from_name(kind.get<std::string>());
  } catch (const InvalidInput& e) {
    throw ParseError(std::string(e.what()) + " at " + where + ".kind");
  }
  if (k == Kernel::dense) {
    const auto& rows = field(j, "table", where);
    if (!rows.is_array() || rows.empty()) throw ParseError("expected a non-empty table at " + where);
    const auto n = static_cast<Eigen::Index>(rows.size());
    DenseTable t(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
      const auto& row = rows[a];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
        throw ParseError("dense table must be square at " + where + ".table[" + std::to_string(a) + "]");
      }
      for (Eigen::Index b = 0; b < n; ++b) t(a, b) = real(row[b], where + ".table");
    }
    return PairwisePotential::dense(std::move(t));
  }
  const double trunc = j.contains("trunc") ? real(j.at("trunc"), where + ".trunc") : 0.0;
  return PairwisePotential::weighted(k, real(field(j, "weight", where), where + ".weight"), trunc);
}

}  // namespace

nlohmann::json model_to_json(const Model& model) {
  nlohmann::json unary = nlohmann::json::array();
  for (int i = 0; i < model.node_count(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int l = 0; l < model.label_count(); ++l) row.push_back(model.unary(i, l));
    unary.push_back(std::move(row));
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const Edge& e : model.edges()) {
    edges.push_back({{"i", e.i}, {"j", e.j}, {"potential", potential_to_json(e.potential)}});
  }
  nlohmann::json grid = nullptr;
  if (model.grid()) grid = {model.grid()->rows, model.grid()->cols};
  return {{"label_count", model.label_count()}, {"grid_shape", grid}, {"unary", unary}, {"edges", edges}};
}

Model model_from_json(const nlohmann::json& j) {
  const int labels = integer(field(j, "label_count", "$"), "$.label_count");
  if (labels < 1) throw ParseError("label_count must be >= 1 at $.label_count");
  const auto& unary_json = field(j, "unary", "$");
  if (!unary_json.is_array() || unary_json.empty()) throw ParseError("'unary' must be a non-empty array at $.unary");
  UnaryTable unary(static_cast<Eigen::Index>(unary_json.size()), labels);
  for (size_t i = 0; i < unary_json.size(); ++i) {
    const std::string where = "$.unary[" + std::to_string(i) + "]";
    const auto& row = unary_json[i];
    if (!row.is_array() || static_cast<int>(row.size()) != labels) {
      throw ParseError("unary row must have label_count entries at " + where);
    }
    for (int l = 0; l < labels; ++l) unary(static_cast<Eigen::Index>(i), l) = real(row[l], where);
  }
  std::vector<Edge> edges;
  if (j.contains("edges")) {
    const auto& arr = j.at("edges");
    if (!arr.is_array()) throw ParseError("'edges' must be an array at $.edges");
    for (size_t e = 0; e < arr.size(); ++e) {
      const std::string where = "$.edges[" + std::to_string(e) + "]";
      edges.push_back({integer(field(arr[e], "i", where), where + ".i"),
                       integer(field(arr[e], "j", where), where + ".j"),
                       potential_from_json(field(arr[e], "potential", where), where + ".potential")});
    }
  }
  std::optional<GridShape> grid;
  if (j.contains("grid_shape") && !j.at("grid_shape").is_null()) {
    const auto& g = j.at("grid_shape");
    if (!g.is_array() || g.size() != 2) throw ParseError("grid_shape must be [rows, cols] at $.grid_shape");
    grid = GridShape{integer(g[0], "$.grid_shape[0]"), integer(g[1], "$.grid_shape[1]")};
  }
  return Model(std::move(unary), std::move(edges), grid);
}

nlohmann::json solution_to_json(const Solution& x) { return {{"labels", x}}; }

Solution solution_from_json(const nlohmann::json& j) {
  const nlohmann::json& arr = j.is_array() ? j : field(j, "labels", "$");
  if (!arr.is_array()) throw ParseError("'labels' must be an array at $.labels");
  Solution x;
  x.reserve(arr.size());
  for (size_t i = 0; i < arr.size(); ++i) x.push_back(integer(arr[i], "$.labels[" + std::to_string(i) + "]"));
  return x;
}

nlohmann::json grouping_to_json(const GroupingFunction& g) { return {{"parent", g.parents()}}; }

GroupingFunction grouping_from_json(const nlohmann::json& j) {
  const auto& arr = field(j, "parent", "$");
  if (!arr.is_array()) throw ParseError("'parent' must be an array at $.parent");
  std::vector<int> parent;
  for (size_t i = 0; i < arr.size(); ++i) parent.push_back(integer(arr[i], "$.parent[" + std::to_string(i) + "]"));
  return GroupingFunction(std::move(parent));
}

std::vector<GroupingFunction> groupings_from_json(const nlohmann::json& j) {
  std::vector<GroupingFunction> out;
  if (j.is_array()) {
    for (const auto& g : j) out.push_back(grouping_from_json(g));
  } else {
    out.push_back(grouping_from_json(j));
  }
  return out;
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace mrfc
