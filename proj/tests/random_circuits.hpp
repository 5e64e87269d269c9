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

// Random small problems shared by the tests and the acceptance suite.

#pragma once

#include <random>
#include <string>
#include <vector>

#include "obppp/channels.hpp"
#include "obppp/circuit.hpp"

namespace testing_util {

struct RandomSpec {
  std::size_t n = 3;
  std::size_t n_params = 6;
  std::size_t n_fixed_clifford = 3;
  double noise_prob = 0.7;       // chance of a channel after each gate qubit
  bool depolarizing = true;
  bool amplitude_damping = true;
  double max_strength = 0.3;
  std::size_t n_terms = 2;
};

inline obppp::Problem random_problem(std::mt19937_64& g, const RandomSpec& spec) {
  using namespace obppp;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto pick = [&](std::size_t k) { return static_cast<std::size_t>(g() % k); };
  const std::size_t n = spec.n;
  Circuit c(n);
  auto add_noise = [&](const std::vector<std::size_t>& qs, int layer) {
    for (std::size_t q : qs) {
      if (u(g) >= spec.noise_prob) continue;
      const double s = spec.max_strength * u(g);
      const bool dep = spec.depolarizing && (!spec.amplitude_damping || u(g) < 0.5);
      if (!dep && !spec.amplitude_damping) continue;
      c.add_noise(dep ? make_depolarizing(s, {q}) : make_amplitude_damping(s, {q}), c.ops().size(), layer,
                  static_cast<int>(c.noise_sites().size()));
    }
  };
  const char* rots[] = {"rx", "ry", "rz", "rxx", "ryy", "rzz"};
  const CliffordKind cliffs[] = {CliffordKind::H, CliffordKind::S, CliffordKind::CX, CliffordKind::CZ,
                                 CliffordKind::Sdg, CliffordKind::SWAP};
  std::size_t placed_params = 0, placed_cliffords = 0;
  int layer = 0;
  while (placed_params < spec.n_params || placed_cliffords < spec.n_fixed_clifford) {
    const bool rot = placed_cliffords >= spec.n_fixed_clifford ||
                     (placed_params < spec.n_params && u(g) < 0.65);
    std::vector<std::size_t> qs;
    if (rot) {
      const std::string name = rots[pick(n >= 2 ? 6 : 3)];
      qs.push_back(pick(n));
      if (name.size() == 3) {
        std::size_t b = pick(n - 1);
        if (b >= qs[0]) ++b;
        qs.push_back(b);
      }
      c.add_named_rotation(name, qs, layer);
      ++placed_params;
    } else {
      const CliffordKind k = cliffs[pick(n >= 2 ? 6 : 2)];
      qs.push_back(pick(n));
      if (clifford_arity(k) == 2) {
        std::size_t b = pick(n - 1);
        if (b >= qs[0]) ++b;
        qs.push_back(b);
      }
      c.add_clifford(k, qs, layer);
      ++placed_cliffords;
    }
    add_noise(qs, layer);
    ++layer;
  }
  std::vector<ObservableSum::Term> terms;
  for (std::size_t h = 0; h < spec.n_terms; ++h) {
    PauliString p(n);
    while (p.is_identity()) {
      for (std::size_t q = 0; q < n; ++q) p.set(q, u(g) < 0.5 ? kI : static_cast<uint8_t>(1 + pick(3)));
    }
    terms.push_back({(u(g) < 0.5 ? -1.0 : 1.0) * (0.3 + 0.7 * u(g)), p});
  }
  return {std::move(c), ObservableSum::from_terms(n, std::move(terms)), SparseState::zero(n)};
}

}  // namespace testing_util
