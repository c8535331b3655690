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

#include <filesystem>
#include <vector>

#include "json.hpp"

#include "mrfc/coarsening.hpp"
#include "mrfc/model.hpp"

namespace mrfc {

// Model:    {"label_count", "grid_shape": [r, c] | null, "unary": [[...]],
//            "edges": [{"i", "j", "potential": {"kind", "weight", "trunc"} | {"kind": "dense", "table"}}]}
// Solution: {"labels": [...]} (a bare array is accepted on input)
// Grouping: {"parent": [...]}

nlohmann::json model_to_json(const Model& model);
Model model_from_json(const nlohmann::json& j);

nlohmann::json solution_to_json(const Solution& x);
Solution solution_from_json(const nlohmann::json& j);

nlohmann::json grouping_to_json(const GroupingFunction& g);
GroupingFunction grouping_from_json(const nlohmann::json& j);
/// A single grouping object or an array of them.
std::vector<GroupingFunction> groupings_from_json(const nlohmann::json& j);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const nlohmann::json& j, const std::filesystem::path& path);

}  // namespace mrfc
