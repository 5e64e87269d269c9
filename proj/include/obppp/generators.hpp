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

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "obppp/circuit.hpp"

namespace obppp {

// Noise attached by the generators. Gate mode puts one single-qubit channel
// per touched qubit after every gate; qubit mode puts one channel on every
// qubit after every layer.
struct NoiseTemplate {
  enum class Mode { Gate, Qubit };
  std::optional<ChannelSpec> channel;  // support is filled in per site
  Mode mode = Mode::Gate;
};

using Edge = std::pair<std::size_t, std::size_t>;

// Line benchmark: p blocks of (R_Z on every qubit, R_XX on neighbours),
// O = X_q X_{q+1} + Z_q with q = floor(n/2), rho = |0..0>.
Problem gen_line_benchmark(std::size_t n, std::size_t p, const NoiseTemplate& noise = {});

// Brick-wall grid: every row is a path, vertical links at (r, c)-(r+1, c)
// when r + c is even. Maximum degree 3, so three edge colors suffice:
// even horizontal, odd horizontal, vertical.
std::array<std::vector<Edge>, 3> grid_edge_coloring(std::size_t rows, std::size_t cols);

// Blocks of R_X layer, three two-qubit layers (rzz or cz), R_Z layer.
// Default observable is Z on the centre qubit.
Problem gen_grid_chip(std::size_t rows, std::size_t cols, std::size_t blocks,
                      const std::string& two_qubit, const NoiseTemplate& noise,
                      std::optional<ObservableSum> observable = std::nullopt);

// Blocks of R_X layer, CZ on even edges, CZ on odd edges, R_Z layer.
// Default observable is Z_0.
Problem gen_ring(std::size_t n, std::size_t blocks, const NoiseTemplate& noise,
                 std::optional<ObservableSum> observable = std::nullopt);

}  // namespace obppp
