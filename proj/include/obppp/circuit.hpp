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

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "obppp/channels.hpp"
#include "obppp/pauli.hpp"
#include "obppp/state.hpp"

namespace obppp {

// Grid angles theta_i = k_i pi/2, one entry per free parameter.
using Theta = std::vector<uint8_t>;

Theta shift_theta(const Theta& t, std::size_t k, int delta);

struct GateOp {
  enum class Type : uint8_t { Rotation, Clifford };
  Type type = Type::Rotation;
  std::string name;                 // as written: rx, rzz, rot, h, cx, ...
  std::vector<std::size_t> qubits;  // as written
  int layer = 0;
  // Rotation exp(-i theta/2 axis); param < 0 means fixed angle fixed_k.
  SparseAxis axis;
  int param = -1;
  uint8_t fixed_k = 0;
  // Clifford
  CliffordKind kind = CliffordKind::I;
};

struct NoiseSite {
  std::size_t position = 0;  // applied after the first `position` ops
  PtmChannel channel;
  int layer = 0;
  int element = 0;
  std::string param_name;  // parameter varied by sensitivity analysis
};

class Circuit {
 public:
  Circuit() = default;
  explicit Circuit(std::size_t n) : n_(n) {}

  std::size_t n() const { return n_; }
  std::size_t n_params() const { return n_params_; }
  int n_layers() const { return n_layers_; }
  const std::vector<GateOp>& ops() const { return ops_; }
  const std::vector<NoiseSite>& noise_sites() const { return sites_; }
  std::vector<NoiseSite>& mutable_noise_sites() { return sites_; }

  // Builders. Rotations with param < 0 get a fresh parameter index.
  int add_rotation(const std::string& name, std::vector<std::size_t> qubits, SparseAxis axis,
                   int param, int layer, uint8_t fixed_k = 0, bool fixed = false);
  int add_named_rotation(const std::string& name, std::vector<std::size_t> qubits, int layer,
                         int param = -1);  // rx ry rz rxx ryy rzz
  void add_clifford(CliffordKind kind, std::vector<std::size_t> qubits, int layer);
  void add_noise(PtmChannel channel, std::size_t position, int layer, int element,
                 std::string param_name = {});
  void set_n_params(std::size_t n) { n_params_ = n; }

  // Invariant checks: indices, param coverage, PCS1 on every channel.
  void validate() const;

  bool all_channels_diagonal() const;
  bool all_channels_prs1() const;
  std::size_t count_rotations() const;

 private:
  std::size_t n_ = 0;
  std::size_t n_params_ = 0;
  int n_layers_ = 0;
  std::vector<GateOp> ops_;
  std::vector<NoiseSite> sites_;
};

// A diagnostic problem: circuit plus what is measured and where it starts.
struct Problem {
  Circuit circuit;
  ObservableSum observable;
  SparseState state;
};

// Replaces every channel parameter `name` at site `site` (used by planners).
Circuit with_site_param(const Circuit& c, std::size_t site, const std::string& name, double value);

SparseAxis axis_for(const std::string& letters, const std::vector<std::size_t>& qubits);

}  // namespace obppp
