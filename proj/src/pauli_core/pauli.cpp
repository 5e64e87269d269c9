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

#include "obppp/pauli.hpp"

#include <algorithm>
#include <functional>

#include "obppp/errors.hpp"

namespace obppp {

namespace {

std::size_t words_for(std::size_t n) { return (n + 63) / 64; }

uint8_t parse_code(char c) {
  switch (c) {
    case 'I': case '_': return kI;
    case 'X': return kX;
    case 'Y': return kY;
    case 'Z': return kZ;
    default: throw ValidationError(std::string("invalid Pauli character '") + c + "'");
  }
}

void check_same_n(const PauliString& p, const PauliString& q) {
  if (p.n() != q.n()) {
    throw DimensionError("Pauli size mismatch: " + std::to_string(p.n()) + " vs " +
                         std::to_string(q.n()));
  }
}

// Strips a sign prefix and returns the i-power it encodes.
uint8_t strip_phase(std::string_view& t) {
  uint8_t q = 0;
  if (t.starts_with("\xE2\x88\x92")) {  // U+2212 minus sign
    q = 2;
    t.remove_prefix(3);
  } else if (t.starts_with("-")) {
    q = 2;
    t.remove_prefix(1);
  } else if (t.starts_with("+")) {
    t.remove_prefix(1);
  }
  if (t.starts_with("i")) {
    q += 1;
    t.remove_prefix(1);
  }
  return q & 3;
}

}  // namespace

char code_char(uint8_t c) { return "IXYZ"[c & 3]; }

PauliString::PauliString(std::size_t n) : n_(n), x_(words_for(n), 0), z_(words_for(n), 0) {}

PauliString PauliString::parse(std::string_view text) {
  PauliString p(text.size());
  for (std::size_t q = 0; q < text.size(); ++q) p.set(q, parse_code(text[q]));
  return p;
}

PauliString PauliString::from_sparse(std::size_t n,
                                     std::span<const std::pair<std::size_t, uint8_t>> ops) {
  PauliString p(n);
  for (const auto& [q, c] : ops) {
    if (q >= n) throw DimensionError("qubit index " + std::to_string(q) + " out of range");
    p.set(q, c);
  }
  return p;
}

void PauliString::set(std::size_t q, uint8_t code) {
  if (q >= n_) throw DimensionError("qubit index " + std::to_string(q) + " out of range");
  set_code(x_.data(), z_.data(), q, code & 3);
}

bool PauliString::is_identity() const {
  for (std::size_t w = 0; w < x_.size(); ++w) {
    if (x_[w] | z_[w]) return false;
  }
  return true;
}

std::size_t PauliString::weight() const {
  std::size_t c = 0;
  for (std::size_t w = 0; w < x_.size(); ++w) c += std::popcount(x_[w] | z_[w]);
  return c;
}

std::vector<std::pair<std::size_t, uint8_t>> PauliString::sparse() const {
  std::vector<std::pair<std::size_t, uint8_t>> out;
  for (std::size_t w = 0; w < x_.size(); ++w) {
    uint64_t m = x_[w] | z_[w];
    while (m) {
      const std::size_t q = w * 64 + std::countr_zero(m);
      out.emplace_back(q, get(q));
      m &= m - 1;
    }
  }
  return out;
}

std::string PauliString::str() const {
  std::string s(n_, 'I');
  for (std::size_t q = 0; q < n_; ++q) s[q] = code_char(get(q));
  return s;
}

bool PauliString::operator<(const PauliString& o) const {
  if (n_ != o.n_) return n_ < o.n_;
  if (x_ != o.x_) return x_ < o.x_;
  return z_ < o.z_;
}

std::size_t PauliString::hash() const {
  uint64_t h = 0x9E3779B97F4A7C15ull ^ n_;
  for (std::size_t w = 0; w < x_.size(); ++w) {
    h ^= x_[w] + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    h ^= z_[w] + 0x7F4A7C159E3779B9ull + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

SignedPauli SignedPauli::parse(std::string_view text) {
  const uint8_t q = strip_phase(text);
  return SignedPauli(PauliString::parse(text), q);
}

std::string SignedPauli::str() const {
  static const char* prefix[4] = {"+", "+i", "-", "-i"};
  return prefix[phase_q & 3] + pauli.str();
}

int SignedPauli::sign() const {
  if (!is_real()) throw std::logic_error("imaginary phase entered a real path factor");
  return (phase_q & 3) == 0 ? 1 : -1;
}

int clifford_arity(CliffordKind kind) {
  switch (kind) {
    case CliffordKind::CX: case CliffordKind::CZ: case CliffordKind::SWAP: return 2;
    default: return 1;
  }
}

CliffordKind clifford_inverse(CliffordKind kind) {
  if (kind == CliffordKind::S) return CliffordKind::Sdg;
  if (kind == CliffordKind::Sdg) return CliffordKind::S;
  return kind;
}

CliffordKind parse_clifford(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "i" || s == "id") return CliffordKind::I;
  if (s == "x") return CliffordKind::X;
  if (s == "y") return CliffordKind::Y;
  if (s == "z") return CliffordKind::Z;
  if (s == "h") return CliffordKind::H;
  if (s == "s") return CliffordKind::S;
  if (s == "sdg" || s == "s_dag" || s == "sdag") return CliffordKind::Sdg;
  if (s == "cx" || s == "cnot") return CliffordKind::CX;
  if (s == "cz") return CliffordKind::CZ;
  if (s == "swap") return CliffordKind::SWAP;
  throw ValidationError("unknown Clifford gate '" + std::string(name) + "'");
}

std::string clifford_name(CliffordKind kind) {
  static const char* names[] = {"i", "x", "y", "z", "h", "s", "sdg", "cx", "cz", "swap"};
  return names[static_cast<int>(kind)];
}

bool commutes(const PauliString& p, const PauliString& q) {
  check_same_n(p, q);
  unsigned parity = 0;
  for (std::size_t w = 0; w < p.num_words(); ++w) {
    parity ^= std::popcount((p.x()[w] & q.z()[w]) ^ (p.z()[w] & q.x()[w])) & 1;
  }
  return parity == 0;
}

SignedPauli multiply(const SignedPauli& p, const SignedPauli& q) {
  check_same_n(p.pauli, q.pauli);
  const std::size_t nw = p.pauli.num_words();
  SignedPauli out(PauliString(p.pauli.n()));
  int ph = p.phase_q + q.phase_q;
  for (std::size_t w = 0; w < nw; ++w) {
    const uint64_t x1 = p.pauli.x()[w], z1 = p.pauli.z()[w];
    const uint64_t x2 = q.pauli.x()[w], z2 = q.pauli.z()[w];
    const uint64_t X1 = x1 & ~z1, Y1 = x1 & z1, Z1 = ~x1 & z1;
    const uint64_t X2 = x2 & ~z2, Y2 = x2 & z2, Z2 = ~x2 & z2;
    const uint64_t plus = (X1 & Y2) | (Y1 & Z2) | (Z1 & X2);
    const uint64_t minus = (Y1 & X2) | (Z1 & Y2) | (X1 & Z2);
    ph += std::popcount(plus) + 3 * std::popcount(minus);
    out.pauli.x()[w] = x1 ^ x2;
    out.pauli.z()[w] = z1 ^ z2;
  }
  out.phase_q = static_cast<uint8_t>(ph & 3);
  return out;
}

void clifford_backprop_inplace(CliffordKind kind, std::size_t a, std::size_t b, uint64_t* x,
                               uint64_t* z, uint8_t& phase) {
  const unsigned xa = get_bit(x, a), za = get_bit(z, a);
  switch (kind) {
    case CliffordKind::I:
      return;
    case CliffordKind::X:
      if (za) phase += 2;
      return;
    case CliffordKind::Y:
      if (xa ^ za) phase += 2;
      return;
    case CliffordKind::Z:
      if (xa) phase += 2;
      return;
    case CliffordKind::H:
      if (xa & za) phase += 2;
      if (xa ^ za) {
        flip_bit(x, a);
        flip_bit(z, a);
      }
      return;
    case CliffordKind::S:  // S^dag X S = -Y, S^dag Y S = X
      if (xa & !za) phase += 2;
      if (xa) flip_bit(z, a);
      return;
    case CliffordKind::Sdg:  // S X S^dag = Y, S Y S^dag = -X
      if (xa & za) phase += 2;
      if (xa) flip_bit(z, a);
      return;
    case CliffordKind::CX: {
      const unsigned xb = get_bit(x, b), zb = get_bit(z, b);
      if (xa & zb & (xb ^ za ^ 1u)) phase += 2;
      if (xa) flip_bit(x, b);
      if (zb) flip_bit(z, a);
      return;
    }
    case CliffordKind::CZ: {
      const unsigned xb = get_bit(x, b), zb = get_bit(z, b);
      if (xa & xb & (za ^ zb)) phase += 2;
      if (xb) flip_bit(z, a);
      if (xa) flip_bit(z, b);
      return;
    }
    case CliffordKind::SWAP: {
      const uint8_t ca = get_code(x, z, a), cb = get_code(x, z, b);
      set_code(x, z, a, cb);
      set_code(x, z, b, ca);
      return;
    }
  }
}

SignedPauli conjugate_clifford(CliffordKind kind, std::span<const std::size_t> qubits,
                               const SignedPauli& p) {
  const int arity = clifford_arity(kind);
  if (static_cast<int>(qubits.size()) != arity) {
    throw ValidationError("gate " + clifford_name(kind) + " expects " + std::to_string(arity) +
                          " qubit(s)");
  }
  for (std::size_t q : qubits) {
    if (q >= p.pauli.n()) throw DimensionError("qubit index " + std::to_string(q) + " out of range");
  }
  if (arity == 2 && qubits[0] == qubits[1]) throw ValidationError("two-qubit gate on one qubit");
  SignedPauli out = p;
  clifford_backprop_inplace(kind, qubits[0], arity == 2 ? qubits[1] : qubits[0], out.pauli.x(),
                            out.pauli.z(), out.phase_q);
  out.phase_q &= 3;
  return out;
}

SignedPauli backprop_rotation(const PauliString& axis, AngleIndex k, const SignedPauli& p) {
  check_same_n(axis, p.pauli);
  SparseAxis sa{axis.sparse()};
  SignedPauli out = p;
  rotation_backprop_inplace(sa, k.k, out.pauli.x(), out.pauli.z(), out.phase_q);
  out.phase_q &= 3;
  return out;
}

}  // namespace obppp
