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

#include "obppp/circuit.hpp"

#include <algorithm>
#include <set>

#include "obppp/errors.hpp"

namespace obppp {

Theta shift_theta(const Theta& t, std::size_t k, int delta) {
  if (k >= t.size()) {
    throw DimensionError("parameter index " + std::to_string(k) + " out of range for " +
                         std::to_string(t.size()) + " parameters");
  }
  Theta out = t;
  out[k] = static_cast<uint8_t>(((static_cast<int>(out[k]) + delta) % 4 + 4) % 4);
  return out;
}

SparseAxis axis_for(const std::string& letters, const std::vector<std::size_t>& qubits) {
  if (letters.size() != qubits.size()) {
    throw ValidationError("rotation axis '" + letters + "' does not match " +
                          std::to_string(qubits.size()) + " qubit(s)");
  }
  SparseAxis a;
  for (std::size_t j = 0; j < qubits.size(); ++j) {
    const auto pos = std::string("IXYZ").find(static_cast<char>(std::toupper(letters[j])));
    if (pos == std::string::npos) throw ValidationError("bad axis letter in '" + letters + "'");
    if (pos != kI) a.ops.emplace_back(qubits[j], static_cast<uint8_t>(pos));
  }
  return a;
}

int Circuit::add_rotation(const std::string& name, std::vector<std::size_t> qubits,
                          SparseAxis axis, int param, int layer, uint8_t fixed_k, bool fixed) {
  GateOp op;
  op.type = GateOp::Type::Rotation;
  op.name = name;
  op.qubits = std::move(qubits);
  op.layer = layer;
  op.axis = std::move(axis);
  if (fixed) {
    op.param = -1;
    op.fixed_k = fixed_k & 3;
  } else {
    if (param < 0) param = static_cast<int>(n_params_);
    op.param = param;
    n_params_ = std::max<std::size_t>(n_params_, static_cast<std::size_t>(param) + 1);
  }
  n_layers_ = std::max(n_layers_, layer + 1);
  ops_.push_back(std::move(op));
  return ops_.back().param;
}

int Circuit::add_named_rotation(const std::string& name, std::vector<std::size_t> qubits,
                                int layer, int param) {
  std::string letters;
  if (name == "rx" || name == "ry" || name == "rz") {
    letters = std::string(1, static_cast<char>(std::toupper(name[1])));
  } else if (name == "rxx" || name == "ryy" || name == "rzz") {
    letters = std::string(2, static_cast<char>(std::toupper(name[1])));
  } else {
    throw ValidationError("unknown rotation '" + name + "'");
  }
  SparseAxis axis = axis_for(letters, qubits);
  return add_rotation(name, std::move(qubits), std::move(axis), param, layer);
}

void Circuit::add_clifford(CliffordKind kind, std::vector<std::size_t> qubits, int layer) {
  GateOp op;
  op.type = GateOp::Type::Clifford;
  op.name = clifford_name(kind);
  op.kind = kind;
  op.qubits = std::move(qubits);
  op.layer = layer;
  n_layers_ = std::max(n_layers_, layer + 1);
  ops_.push_back(std::move(op));
}

void Circuit::add_noise(PtmChannel channel, std::size_t position, int layer, int element,
                        std::string param_name) {
  NoiseSite s;
  s.position = position;
  if (param_name.empty()) param_name = default_noise_param(channel.spec().kind);
  s.channel = std::move(channel);
  s.layer = layer;
  s.element = element;
  s.param_name = std::move(param_name);
  n_layers_ = std::max(n_layers_, layer + 1);
  sites_.push_back(std::move(s));
}

void Circuit::validate() const {
  std::vector<int> used(n_params_, 0);
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    const GateOp& op = ops_[i];
    const std::string where = "gate " + std::to_string(i) + " (" + op.name + ")";
    std::set<std::size_t> seen;
    for (std::size_t q : op.qubits) {
      if (q >= n_) throw DimensionError(where + ": qubit " + std::to_string(q) + " out of range");
      if (!seen.insert(q).second) throw ValidationError(where + ": repeated qubit");
    }
    if (op.type == GateOp::Type::Rotation) {
      if (op.axis.ops.empty()) throw ValidationError(where + ": rotation axis is the identity");
      for (const auto& [q, c] : op.axis.ops) {
        if (q >= n_) throw DimensionError(where + ": axis qubit out of range");
      }
      if (op.param >= 0) {
        if (static_cast<std::size_t>(op.param) >= n_params_) {
          throw ValidationError(where + ": parameter index out of range");
        }
        used[op.param]++;
      }
    } else if (static_cast<int>(op.qubits.size()) != clifford_arity(op.kind)) {
      throw ValidationError(where + ": wrong number of qubits");
    }
  }
  for (std::size_t k = 0; k < n_params_; ++k) {
    if (!used[k]) throw ValidationError("parameter " + std::to_string(k) + " is never used");
  }
  for (std::size_t s = 0; s < sites_.size(); ++s) {
    const NoiseSite& site = sites_[s];
    const std::string where = "noise site " + std::to_string(s) + " (" + site.channel.label() + ")";
    if (site.position > ops_.size()) throw ValidationError(where + ": position past end of circuit");
    for (std::size_t q : site.channel.support()) {
      if (q >= n_) throw DimensionError(where + ": qubit " + std::to_string(q) + " out of range");
    }
    if (!site.channel.flags().pcs1) throw ValidationError(where + ": channel is not PCS1");
    if (!site.channel.flags().tp) throw ValidationError(where + ": channel is not trace preserving");
  }
}

bool Circuit::all_channels_diagonal() const {
  return std::all_of(sites_.begin(), sites_.end(),
                     [](const NoiseSite& s) { return s.channel.is_diagonal(); });
}

bool Circuit::all_channels_prs1() const {
  return std::all_of(sites_.begin(), sites_.end(),
                     [](const NoiseSite& s) { return s.channel.flags().prs1; });
}

std::size_t Circuit::count_rotations() const {
  return std::count_if(ops_.begin(), ops_.end(),
                       [](const GateOp& o) { return o.type == GateOp::Type::Rotation; });
}

Circuit with_site_param(const Circuit& c, std::size_t site, const std::string& name, double value) {
  if (site >= c.noise_sites().size()) throw DimensionError("noise site index out of range");
  Circuit out = c;
  NoiseSite& s = out.mutable_noise_sites()[site];
  s.channel = with_param(s.channel, name, value);
  return out;
}

}  // namespace obppp
