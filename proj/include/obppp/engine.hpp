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
#include <vector>

#include "obppp/circuit.hpp"
#include "obppp/rng.hpp"

namespace obppp {

struct PathSample {
  double value = 0.0;
  bool terminal = false;          // stopped early on a zero weight
  std::vector<uint32_t> taus;     // per visited branching site, if requested
};

// Working Pauli for a path walk. Reused across samples to avoid allocation.
struct PathState {
  std::vector<uint64_t> x, z;
  uint8_t phase = 0;
  double weight = 1.0;
  void load(const PauliString& p, double w);
};

// (site index, local factor) for each depolarizing site a tracked walk met
// with a non-identity local Pauli.
struct TrackedFactor {
  uint32_t site;
  double factor;
};

// Compiled form of a circuit for Pauli-path walks. Immutable and shareable
// between threads; all per-walk state lives in PathState.
class Engine {
 public:
  Engine(const Circuit& circuit, const SparseState& state);
  // The tape points into circuit_, so copies would dangle.
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  const Circuit& circuit() const { return circuit_; }
  const SparseState& state() const { return state_; }
  std::size_t n() const { return circuit_.n(); }
  // True when every channel is Pauli-diagonal: one path per term, exact.
  bool deterministic() const { return deterministic_; }

  // Heisenberg walk from the circuit output back to rho. Returns
  // weight * sign * tr(P rho) with P unnormalized; 0 on early exit.
  // rng may be null only for deterministic circuits.
  double walk_back(const Theta& theta, PathState& s, RngStream* rng,
                   std::vector<uint32_t>* taus = nullptr) const;
  // Same, skipping every noise site.
  double walk_back_noiseless(const Theta& theta, PathState& s) const;
  // Depolarizing factors are recorded instead of applied.
  double walk_back_tracked(const Theta& theta, PathState& s, RngStream* rng,
                           std::vector<TrackedFactor>& tracked) const;
  // Schroedinger walk of s through the noisy circuit using PTM rows. Leaves
  // the propagated Pauli in s. Requires PRS1 channels for bounded weights.
  void walk_forward(const Theta& theta, PathState& s, RngStream* rng) const;
  // Exact sum over every channel branch of the backward walk.
  double enumerate_back(const Theta& theta, const PathState& s, std::size_t branch_cap,
                        std::size_t& leaves) const;

  PathSample backprop_term(const Theta& theta, const ObservableSum::Term& term, RngStream* rng,
                           bool record = false) const;

 private:
  struct Instr {
    enum Kind : uint8_t { Clifford, Rotation, NoiseDiag1, NoiseDiag, NoiseUniform, NoiseBranch };
    Kind kind;
    CliffordKind ck = CliffordKind::I;
    uint8_t fixed_k = 0;
    bool tracked = false;  // depolarizing site, for sensitivity walks
    int32_t param = -1;
    uint32_t a = 0, b = 0;
    uint32_t site = 0;
    const SparseAxis* axis = nullptr;
    const PtmChannel* ch = nullptr;
    double diag1[4] = {1, 1, 1, 1};
  };

  uint32_t local_index(const Instr& in, const PathState& s) const;
  void write_local(const Instr& in, PathState& s, uint32_t idx) const;
  double finish(const PathState& s) const;
  double enumerate_from(const Theta& theta, PathState s, std::size_t pos, std::size_t cap,
                        std::size_t& leaves) const;

  Circuit circuit_;
  SparseState state_;
  std::vector<Instr> tape_;
  bool deterministic_ = true;
};

// Mean over n_tau inner samples of sum_h backprop_term. Each term of inner
// sample i draws from stream_key({key, i, h}). n_tau is forced to 1 for
// deterministic circuits.
struct InnerEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n_tau = 0;
};

InnerEstimate estimate_expectation(const Engine& e, const ObservableSum& obs, const Theta& theta,
                                   std::size_t n_tau, uint64_t seed, uint64_t key);
// Fast single-value form of the mean above.
double expectation_mean(const Engine& e, const ObservableSum& obs, const Theta& theta,
                        std::size_t n_tau, uint64_t seed, uint64_t key);
double noiseless_expectation(const Engine& e, const ObservableSum& obs, const Theta& theta);
// Exact noisy <O>_theta by branch enumeration; throws CapExceeded past branch_cap.
double enumerate_expectation_exact(const Engine& e, const ObservableSum& obs, const Theta& theta,
                                   std::size_t branch_cap);

Theta sample_theta(RngStream& rng, std::size_t n_params);
// Uniform over {I,X,Y,Z}^n, or {I,Z}^n when z_only.
PauliString sample_pauli(RngStream& rng, std::size_t n, bool z_only);

}  // namespace obppp
