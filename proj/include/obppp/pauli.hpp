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

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace obppp {

// Single-qubit Pauli codes. The (x, z) bit pair of code c is
// x = (c == 1 || c == 2), z = (c == 2 || c == 3).
enum : uint8_t { kI = 0, kX = 1, kY = 2, kZ = 3 };

constexpr uint8_t code_x(uint8_t c) { return (c == kX || c == kY) ? 1 : 0; }
constexpr uint8_t code_z(uint8_t c) { return (c == kY || c == kZ) ? 1 : 0; }
constexpr uint8_t code_from_bits(uint8_t x, uint8_t z) {
  constexpr uint8_t table[4] = {kI, kX, kZ, kY};
  return table[(x & 1) | ((z & 1) << 1)];
}

// Exponent of i picked up by the single-qubit product a*b (XY = iZ etc.).
constexpr uint8_t product_phase(uint8_t a, uint8_t b) {
  constexpr uint8_t table[4][4] = {
      {0, 0, 0, 0}, {0, 0, 1, 3}, {0, 3, 0, 1}, {0, 1, 3, 0}};
  return table[a][b];
}
constexpr uint8_t product_code(uint8_t a, uint8_t b) {
  return code_from_bits(code_x(a) ^ code_x(b), code_z(a) ^ code_z(b));
}

char code_char(uint8_t c);

// n-qubit Pauli word without phase. Bit q of x/z lives in word q / 64.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(std::size_t n);
  static PauliString parse(std::string_view text);
  // Sparse form: {(qubit, code)}, identity elsewhere.
  static PauliString from_sparse(std::size_t n,
                                 std::span<const std::pair<std::size_t, uint8_t>> ops);

  std::size_t n() const { return n_; }
  std::size_t num_words() const { return x_.size(); }
  uint8_t get(std::size_t q) const {
    return code_from_bits((x_[q >> 6] >> (q & 63)) & 1, (z_[q >> 6] >> (q & 63)) & 1);
  }
  void set(std::size_t q, uint8_t code);

  bool is_identity() const;
  std::size_t weight() const;
  std::vector<std::pair<std::size_t, uint8_t>> sparse() const;
  std::string str() const;

  uint64_t* x() { return x_.data(); }
  uint64_t* z() { return z_.data(); }
  const uint64_t* x() const { return x_.data(); }
  const uint64_t* z() const { return z_.data(); }

  bool operator==(const PauliString& o) const = default;
  bool operator<(const PauliString& o) const;
  std::size_t hash() const;

 private:
  std::size_t n_ = 0;
  std::vector<uint64_t> x_, z_;
};

struct PauliStringHash {
  std::size_t operator()(const PauliString& p) const { return p.hash(); }
};

// A Pauli word times i^phase_q.
struct SignedPauli {
  PauliString pauli;
  uint8_t phase_q = 0;

  SignedPauli() = default;
  explicit SignedPauli(PauliString p, uint8_t q = 0) : pauli(std::move(p)), phase_q(q & 3) {}
  // Accepts an optional leading "+", "-", "i", "-i" (U+2212 also accepted as minus).
  static SignedPauli parse(std::string_view text);
  std::string str() const;
  bool is_real() const { return (phase_q & 1) == 0; }
  // +1 or -1. Throws if the phase is imaginary.
  int sign() const;
  bool operator==(const SignedPauli& o) const = default;
};

// Angle index k meaning theta = k*pi/2, always kept in {0,1,2,3}.
struct AngleIndex {
  uint8_t k = 0;
  AngleIndex() = default;
  explicit AngleIndex(int v) : k(static_cast<uint8_t>(((v % 4) + 4) % 4)) {}
};

enum class CliffordKind : uint8_t { I, X, Y, Z, H, S, Sdg, CX, CZ, SWAP };

int clifford_arity(CliffordKind kind);
CliffordKind clifford_inverse(CliffordKind kind);
CliffordKind parse_clifford(std::string_view name);  // throws ValidationError
std::string clifford_name(CliffordKind kind);

bool commutes(const PauliString& p, const PauliString& q);
SignedPauli multiply(const SignedPauli& p, const SignedPauli& q);
// Returns C^dagger p C.
SignedPauli conjugate_clifford(CliffordKind kind, std::span<const std::size_t> qubits,
                               const SignedPauli& p);
// Returns R^dagger p R with R = exp(-i k pi/4 axis).
SignedPauli backprop_rotation(const PauliString& axis, AngleIndex k, const SignedPauli& p);

// ---------------------------------------------------------------------------
// In-place kernels used by the path engine. They touch only support bits.

inline bool get_bit(const uint64_t* w, std::size_t q) { return (w[q >> 6] >> (q & 63)) & 1; }
inline void flip_bit(uint64_t* w, std::size_t q) { w[q >> 6] ^= uint64_t{1} << (q & 63); }

inline uint8_t get_code(const uint64_t* x, const uint64_t* z, std::size_t q) {
  return code_from_bits(get_bit(x, q), get_bit(z, q));
}
inline void set_code(uint64_t* x, uint64_t* z, std::size_t q, uint8_t c) {
  const uint64_t m = uint64_t{1} << (q & 63);
  const std::size_t w = q >> 6;
  x[w] = code_x(c) ? (x[w] | m) : (x[w] & ~m);
  z[w] = code_z(c) ? (z[w] | m) : (z[w] & ~m);
}

// phase is an i-power accumulator (mod 4 applied by the caller when read).
void clifford_backprop_inplace(CliffordKind kind, std::size_t a, std::size_t b, uint64_t* x,
                               uint64_t* z, uint8_t& phase);

// Sparse rotation axis with positive sign.
struct SparseAxis {
  std::vector<std::pair<std::size_t, uint8_t>> ops;
};

inline bool axis_anticommutes(const SparseAxis& axis, const uint64_t* x, const uint64_t* z) {
  unsigned parity = 0;
  for (const auto& [q, c] : axis.ops) {
    parity ^= (code_x(c) & get_bit(z, q)) ^ (code_z(c) & get_bit(x, q));
  }
  return parity & 1;
}

// p <- axis * p, returning the i-power of the product.
inline uint8_t axis_left_multiply(const SparseAxis& axis, uint64_t* x, uint64_t* z) {
  uint8_t ph = 0;
  for (const auto& [q, c] : axis.ops) {
    const uint8_t b = get_code(x, z, q);
    ph += product_phase(c, b);
    if (code_x(c)) flip_bit(x, q);
    if (code_z(c)) flip_bit(z, q);
  }
  return ph;
}

// Heisenberg-picture rotation by exp(-i k pi/4 P): unchanged when commuting,
// cos(k pi/2) p + i sin(k pi/2) P p otherwise.
inline void rotation_backprop_inplace(const SparseAxis& axis, uint8_t k, uint64_t* x, uint64_t* z,
                                      uint8_t& phase) {
  if (k == 0 || !axis_anticommutes(axis, x, z)) return;
  if (k == 2) {
    phase += 2;
    return;
  }
  phase += axis_left_multiply(axis, x, z) + (k == 1 ? 1 : 3);
}

}  // namespace obppp
