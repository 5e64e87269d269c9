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
#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "obppp/cli.hpp"
#include "obppp/errors.hpp"

namespace obppp {

using nlohmann::json;

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("SHA-256 unavailable");
  }
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int{md[i]};
  return hex.str();
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest::RunManifest(std::string command, std::vector<std::string> args)
    : command_(std::move(command)), args_(std::move(args)), started_(utc_timestamp()) {}

void RunManifest::add_input(const std::string& path) { inputs_.emplace_back(path, sha256_file(path)); }

void RunManifest::add_output(const std::string& path) { outputs_.push_back(path); }

json RunManifest::to_json() const {
  json j;
  j["command"] = command_;
  j["args"] = args_;
  json in = json::array();
  for (const auto& [p, h] : inputs_) in.push_back({{"path", p}, {"sha256", h}});
  j["inputs"] = in;
  j["outputs"] = outputs_;
  if (has_seed_) j["seed"] = seed_;
  if (!config_.is_null()) j["config"] = config_;
  j["versions"] = {{"obppp", kVersion}, {"circuit_format", 1}};
  j["started_at"] = started_;
  j["finished_at"] = finished_;
  j["timings_s"] = timings_;
  return j;
}

void RunManifest::write(const std::string& path) {
  finished_ = utc_timestamp();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << to_json().dump(2) << "\n";
}

}  // namespace obppp
