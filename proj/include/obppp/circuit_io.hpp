// Copyright 2026 The obppp Authors
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

#include <string>

#include <json.hpp>

#include "obppp/circuit.hpp"

namespace obppp {

// Circuit file, "format": 1. See README for the schema.
nlohmann::json problem_to_json(const Problem& p);
nlohmann::json channel_to_json(const ChannelSpec& spec);
ChannelSpec channel_spec_from_json(const nlohmann::json& j, const std::string& where);
// Validates everything, including PCS1 on each channel. Errors name the
// offending JSON path.
Problem problem_from_json(const nlohmann::json& j);
// Parse errors report line and column.
nlohmann::json read_json_file(const std::string& path);
Problem load_problem(const std::string& path);
void save_json(const nlohmann::json& j, const std::string& path);

}  // namespace obppp
