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
#include <set>

#include "obppp/cli.hpp"
#include "obppp/errors.hpp"

namespace obppp {

using nlohmann::json;

// Laptop-scale counts. The ratios between kinds follow the published
// simulation setups; absolute sizes are cut so each run takes seconds.
DiagnosticConfig default_config(const std::string& kind) {
  DiagnosticConfig c;
  c.threads = 0;
  if (kind == "mse" || kind == "variance" || kind == "sensitivity" || kind == "bottleneck") {
    c.n_theta = std::size_t{1} << 14;
    c.n_tau = 16;
  } else if (kind == "gradvar") {
    c.n_theta = std::size_t{1} << 12;
    c.n_tau = std::size_t{1} << 6;
  } else if (kind == "expressibility" || kind == "expressibility-lb") {
    c.n_theta = std::size_t{1} << 8;
    c.n_sigma = std::size_t{1} << 10;
    c.n_tau = std::size_t{1} << 6;
  } else if (kind == "benchmark") {
    c.n_theta = 100000;
    c.n_tau = 1;
  } else {
    throw ValidationError("no defaults for '" + kind + "'");
  }
  return c;
}

namespace {

std::size_t count_field(const json& v, const std::string& key) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw ValidationError("config key '" + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

double real_field(const json& v, const std::string& key) {
  if (!v.is_number()) throw ValidationError("config key '" + key + "' must be a number");
  return v.get<double>();
}

std::string string_field(const json& v, const std::string& key) {
  if (!v.is_string()) throw ValidationError("config key '" + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

EvalMode parse_eval_mode(const std::string& s) {
  if (s == "sampled") return EvalMode::Sampled;
  if (s == "exact") return EvalMode::Exact;
  throw ValidationError("mode must be 'sampled' or 'exact', got '" + s + "'");
}

SensitivityMode parse_sensitivity_mode(const std::string& s) {
  if (s == "auto") return SensitivityMode::Auto;
  if (s == "path") return SensitivityMode::Path;
  if (s == "fd") return SensitivityMode::FiniteDifference;
  throw ValidationError("sensitivity mode must be auto, path or fd, got '" + s + "'");
}

void apply_config_json(const json& j, DiagnosticConfig& cfg, SensitivityOptions* sens) {
  if (!j.is_object()) throw ValidationError("config file must hold a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "n_theta") cfg.n_theta = count_field(v, key);
    else if (key == "n_tau") cfg.n_tau = count_field(v, key);
    else if (key == "n_sigma") cfg.n_sigma = count_field(v, key);
    else if (key == "seed") cfg.seed = count_field(v, key);
    else if (key == "threads") cfg.threads = count_field(v, key);
    else if (key == "chunk") cfg.chunk = count_field(v, key);
    else if (key == "max_grid_points") cfg.max_grid_points = count_field(v, key);
    else if (key == "branch_cap") cfg.branch_cap = count_field(v, key);
    else if (key == "mode") cfg.mode = parse_eval_mode(string_field(v, key));
    else if (key == "epsilon") cfg.epsilon = real_field(v, key);
    else if (key == "delta") cfg.delta = real_field(v, key);
    else if (key == "sensitivity_mode" && sens) sens->mode = parse_sensitivity_mode(string_field(v, key));
    else if (key == "fd_step" && sens) sens->fd_step = real_field(v, key);
    else throw ValidationError("unknown config key '" + key + "'");
  }
}

}  // namespace obppp
