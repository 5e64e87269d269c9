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

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "obppp/estimators.hpp"

namespace obppp {

inline constexpr const char* kVersion = "1.0.0";

// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitValidation = 2 };

// Runs the tool with args excluding the program name. Everything the tool
// prints goes to out and err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Scaled-down sample counts used when neither the config file nor a flag
// sets them. kind is a diagnose kind, "bottleneck" or "benchmark".
DiagnosticConfig default_config(const std::string& kind);

// Overlays the keys of a JSON config object on cfg. Unknown keys and bad
// types raise ValidationError naming the key.
void apply_config_json(const nlohmann::json& j, DiagnosticConfig& cfg, SensitivityOptions* sens = nullptr);

EvalMode parse_eval_mode(const std::string& s);            // sampled | exact
SensitivityMode parse_sensitivity_mode(const std::string& s);  // auto | path | fd

// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

// Run record written next to every set of outputs.
class RunManifest {
 public:
  RunManifest(std::string command, std::vector<std::string> args);
  void add_input(const std::string& path);
  void add_output(const std::string& path);
  void set_seed(uint64_t seed) { seed_ = seed; has_seed_ = true; }
  void set_config(nlohmann::json c) { config_ = std::move(c); }
  void add_timing(const std::string& name, double seconds) { timings_[name] = seconds; }
  nlohmann::json to_json() const;
  // Writes the manifest with the finish time filled in.
  void write(const std::string& path);

 private:
  std::string command_;
  std::vector<std::string> args_;
  std::vector<std::pair<std::string, std::string>> inputs_;
  std::vector<std::string> outputs_;
  uint64_t seed_ = 0;
  bool has_seed_ = false;
  nlohmann::json config_;
  nlohmann::json timings_ = nlohmann::json::object();
  std::string started_, finished_;
};

std::string utc_timestamp();

}  // namespace obppp
