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

#include "obppp/generators.hpp"

#include "obppp/errors.hpp"

namespace obppp {

namespace {

class NoiseAttacher {
 public:
  NoiseAttacher(Circuit& c, const NoiseTemplate& t) : c_(c), t_(t) {}

  void after_gate(const std::vector<std::size_t>& qubits, int layer) {
    if (!t_.channel || t_.mode != NoiseTemplate::Mode::Gate) return;
    for (std::size_t q : qubits) attach(q, layer);
  }
  void after_layer(int layer) {
    if (!t_.channel || t_.mode != NoiseTemplate::Mode::Qubit) return;
    for (std::size_t q = 0; q < c_.n(); ++q) attach(q, layer);
  }

 private:
  void attach(std::size_t q, int layer) {
    if (layer != cur_layer_) {
      cur_layer_ = layer;
      element_ = 0;
    }
    ChannelSpec s = *t_.channel;
    s.support = {q};
    c_.add_noise(build_channel(s), c_.ops().size(), layer, element_++);
  }

  Circuit& c_;
  const NoiseTemplate& t_;
  int cur_layer_ = -1;
  int element_ = 0;
};

}  // namespace

Problem gen_line_benchmark(std::size_t n, std::size_t p, const NoiseTemplate& noise) {
  if (n < 2 || p < 1) throw ValidationError("line benchmark needs n >= 2 and p >= 1");
  Circuit c(n);
  NoiseAttacher attach(c, noise);
  int layer = 0;
  for (std::size_t b = 0; b < p; ++b) {
    for (std::size_t q = 0; q < n; ++q) {
      c.add_named_rotation("rz", {q}, layer);
      attach.after_gate({q}, layer);
    }
    attach.after_layer(layer);
    ++layer;
    for (std::size_t q = 0; q + 1 < n; ++q) {
      c.add_named_rotation("rxx", {q, q + 1}, layer);
      attach.after_gate({q, q + 1}, layer);
    }
    attach.after_layer(layer);
    ++layer;
  }
  c.validate();
  const std::size_t q = n / 2;
  std::vector<ObservableSum::Term> terms;
  PauliString xx(n), z(n);
  xx.set(q, kX);
  if (q + 1 < n) xx.set(q + 1, kX);
  z.set(q, kZ);
  terms.push_back({1.0, xx});
  terms.push_back({1.0, z});
  return {std::move(c), ObservableSum::from_terms(n, std::move(terms)), SparseState::zero(n)};
}

std::array<std::vector<Edge>, 3> grid_edge_coloring(std::size_t rows, std::size_t cols) {
  std::array<std::vector<Edge>, 3> colors;
  auto id = [cols](std::size_t r, std::size_t c) { return r * cols + c; };
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c + 1 < cols; ++c) colors[c % 2].emplace_back(id(r, c), id(r, c + 1));
  }
  for (std::size_t r = 0; r + 1 < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if ((r + c) % 2 == 0) colors[2].emplace_back(id(r, c), id(r + 1, c));
    }
  }
  return colors;
}

Problem gen_grid_chip(std::size_t rows, std::size_t cols, std::size_t blocks,
                      const std::string& two_qubit, const NoiseTemplate& noise,
                      std::optional<ObservableSum> observable) {
  if (rows < 2 || cols < 2) throw ValidationError("grid chip needs rows, cols >= 2");
  if (blocks < 1) throw ValidationError("grid chip needs at least one block");
  if (two_qubit != "rzz" && two_qubit != "cz") {
    throw ValidationError("grid two-qubit gate must be rzz or cz, got '" + two_qubit + "'");
  }
  const std::size_t n = rows * cols;
  const auto colors = grid_edge_coloring(rows, cols);
  Circuit c(n);
  NoiseAttacher attach(c, noise);
  int layer = 0;
  for (std::size_t b = 0; b < blocks; ++b) {
    for (std::size_t q = 0; q < n; ++q) {
      c.add_named_rotation("rx", {q}, layer);
      attach.after_gate({q}, layer);
    }
    attach.after_layer(layer++);
    for (const auto& edges : colors) {
      for (const auto& [a, bq] : edges) {
        if (two_qubit == "cz") {
          c.add_clifford(CliffordKind::CZ, {a, bq}, layer);
        } else {
          c.add_named_rotation("rzz", {a, bq}, layer);
        }
        attach.after_gate({a, bq}, layer);
      }
      attach.after_layer(layer++);
    }
    for (std::size_t q = 0; q < n; ++q) {
      c.add_named_rotation("rz", {q}, layer);
      attach.after_gate({q}, layer);
    }
    attach.after_layer(layer++);
  }
  c.validate();
  if (!observable) {
    PauliString z(n);
    z.set((rows / 2) * cols + cols / 2, kZ);
    observable = ObservableSum::from_terms(n, {{1.0, z}});
  }
  if (observable->n() != n) throw DimensionError("observable size does not match the grid");
  return {std::move(c), std::move(*observable), SparseState::zero(n)};
}

Problem gen_ring(std::size_t n, std::size_t blocks, const NoiseTemplate& noise,
                 std::optional<ObservableSum> observable) {
  if (n < 4 || n % 2 != 0) {
    throw ValidationError("ring needs an even qubit count >= 4 (odd rings are not 2-colorable)");
  }
  if (blocks < 1) throw ValidationError("ring needs at least one block");
  Circuit c(n);
  NoiseAttacher attach(c, noise);
  int layer = 0;
  for (std::size_t b = 0; b < blocks; ++b) {
    for (std::size_t q = 0; q < n; ++q) {
      c.add_named_rotation("rx", {q}, layer);
      attach.after_gate({q}, layer);
    }
    attach.after_layer(layer++);
    for (std::size_t parity = 0; parity < 2; ++parity) {
      for (std::size_t q = parity; q < n; q += 2) {
        const std::size_t r = (q + 1) % n;
        c.add_clifford(CliffordKind::CZ, {q, r}, layer);
        attach.after_gate({q, r}, layer);
      }
      attach.after_layer(layer++);
    }
    for (std::size_t q = 0; q < n; ++q) {
      c.add_named_rotation("rz", {q}, layer);
      attach.after_gate({q}, layer);
    }
    attach.after_layer(layer++);
  }
  c.validate();
  if (!observable) {
    PauliString z(n);
    z.set(0, kZ);
    observable = ObservableSum::from_terms(n, {{1.0, z}});
  }
  if (observable->n() != n) throw DimensionError("observable size does not match the ring");
  return {std::move(c), std::move(*observable), SparseState::zero(n)};
}

}  // namespace obppp
