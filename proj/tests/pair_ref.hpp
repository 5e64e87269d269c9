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

// Exact Var_theta <O> for a circuit made only of independent single-angle
// Pauli rotations, using the two-copy average directly: for each rotation
// E[cos^2] = E[sin^2] = 1/2 and E[cos sin] = E[cos] = E[sin] = 0 on the
// uniform four-point grid and on the circle alike. A pair (a, b) of Pauli
// words survives a rotation P only if a and b both commute or both
// anticommute with P. Pairs are grouped by the class D ~ a b, which every
// rotation preserves, so each class is one dense vector over a.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ref {

struct WordXZ {
  uint32_t x = 0, z = 0;
};

inline bool anticommute(WordXZ a, WordXZ b) {
  return (__builtin_popcount(a.x & b.z) + __builtin_popcount(a.z & b.x)) & 1;
}

// Exponent k with P(a) P(b) = i^k P(a xor b) for Hermitian words.
inline int product_phase(WordXZ a, WordXZ b, unsigned n) {
  int k = 0;
  for (unsigned q = 0; q < n; ++q) {
    const int x1 = (a.x >> q) & 1, z1 = (a.z >> q) & 1, x2 = (b.x >> q) & 1, z2 = (b.z >> q) & 1;
    if (x1 && z1) k += z2 - x2;
    else if (x1) k += z2 * (2 * x2 - 1);
    else if (z1) k += x2 * (1 - 2 * z2);
  }
  return ((k % 4) + 4) % 4;
}

struct RotationCircuit {
  unsigned n = 0;
  std::vector<WordXZ> axes;                        // forward order
  std::vector<std::pair<double, WordXZ>> terms;    // observable, distinct non-identity words
};

struct PairMoments {
  double mean = 0.0, second = 0.0;
  double variance() const { return second - mean * mean; }
};

inline PairMoments pair_moments(const RotationCircuit& c) {
  if (c.n > 12) throw std::invalid_argument("pair oracle limited to 12 qubits");
  const unsigned n = c.n;
  const std::size_t dim = std::size_t{1} << (2 * n);
  auto idx = [n](WordXZ w) { return static_cast<std::size_t>(w.x) | (static_cast<std::size_t>(w.z) << n); };
  auto word = [n](std::size_t i) { return WordXZ{static_cast<uint32_t>(i & ((1u << n) - 1)), static_cast<uint32_t>(i >> n)}; };
  // sign s with i P a = s a' for anticommuting P, a
  auto step = [n](WordXZ p, WordXZ a, WordXZ& out) {
    out = {p.x ^ a.x, p.z ^ a.z};
    const int k = (product_phase(p, a, n) + 1) % 4;
    if (k != 0 && k != 2) throw std::logic_error("non-Hermitian product");
    return k == 0 ? 1.0 : -1.0;
  };

  PairMoments m;
  for (const auto& [ch, ph] : c.terms) {
    bool survives = ph.x == 0;
    for (const WordXZ& p : c.axes) survives = survives && !anticommute(p, ph);
    if (survives) m.mean += ch;
  }

  // group starting pairs by class
  std::vector<std::pair<WordXZ, std::vector<double>>> classes;
  for (const auto& [ch, ph] : c.terms) {
    for (const auto& [ck, pk] : c.terms) {
      const WordXZ d{ph.x ^ pk.x, ph.z ^ pk.z};
      std::vector<double>* v = nullptr;
      for (auto& [cd, cv] : classes) {
        if (cd.x == d.x && cd.z == d.z) v = &cv;
      }
      if (!v) {
        classes.emplace_back(d, std::vector<double>(dim, 0.0));
        v = &classes.back().second;
      }
      (*v)[idx(ph)] += ch * ck;
    }
  }

  std::vector<double> next(dim);
  for (auto& [d, v] : classes) {
    bool dead = false;
    for (auto it = c.axes.rbegin(); it != c.axes.rend() && !dead; ++it) {
      const WordXZ p = *it;
      if (anticommute(p, d)) {
        dead = true;
        break;
      }
      next = v;
      for (std::size_t i = 0; i < dim; ++i) {
        if (v[i] == 0.0) continue;
        const WordXZ a = word(i);
        if (!anticommute(p, a)) continue;
        const WordXZ b{a.x ^ d.x, a.z ^ d.z};
        WordXZ a2, b2;
        const double s = step(p, a, a2) * step(p, b, b2);
        next[i] -= 0.5 * v[i];
        next[idx(a2)] += 0.5 * s * v[i];
      }
      v.swap(next);
    }
    if (dead) continue;
    for (std::size_t i = 0; i < dim; ++i) {
      const WordXZ a = word(i);
      if (a.x == 0 && (a.x ^ d.x) == 0) m.second += v[i];
    }
  }
  return m;
}

// The ZZ/XX line benchmark: per block R_Z on every qubit, then R_XX on
// neighbours, observable X_q X_{q+1} + Z_q with q = n/2.
inline RotationCircuit line_benchmark_ref(unsigned n, unsigned p) {
  RotationCircuit c;
  c.n = n;
  for (unsigned b = 0; b < p; ++b) {
    for (unsigned q = 0; q < n; ++q) c.axes.push_back({0, 1u << q});
    for (unsigned q = 0; q + 1 < n; ++q) c.axes.push_back({(1u << q) | (1u << (q + 1)), 0});
  }
  const unsigned q = n / 2;
  c.terms.push_back({1.0, {(1u << q) | (q + 1 < n ? 1u << (q + 1) : 0u), 0}});
  c.terms.push_back({1.0, {0, 1u << q}});
  return c;
}

// Noiseless two-copy frame potential E_{theta,theta'} tr(rho rho')^2 from
// |0^n>, for circuits of single-angle Pauli rotations and CZ gates. The
// state average E rho^{(x)2} = 4^{-n} sum c_ab a (x) b is evolved forward;
// both gate kinds map a class D ~ a b to a single class, so the classes are
// processed one at a time. The result is sum c^2 / 4^n.
struct TwoCopyOp {
  bool cz = false;
  WordXZ axis;             // rotation
  unsigned q = 0, r = 0;   // cz
};

inline void cz_conjugate(WordXZ& w, double& sign, unsigned q, unsigned r) {
  const uint32_t xq = (w.x >> q) & 1, xr = (w.x >> r) & 1, zq = (w.z >> q) & 1, zr = (w.z >> r) & 1;
  if (xq && xr && (zq ^ zr)) sign = -sign;
  w.z ^= (xr << q) | (xq << r);
}

inline double frame_potential(unsigned n, const std::vector<TwoCopyOp>& ops) {
  if (n > 10) throw std::invalid_argument("two-copy oracle limited to 10 qubits");
  const std::size_t half = std::size_t{1} << n, dim = half * half;
  auto idx = [n](WordXZ w) { return static_cast<std::size_t>(w.x) | (static_cast<std::size_t>(w.z) << n); };
  auto word = [n](std::size_t i) { return WordXZ{static_cast<uint32_t>(i & ((1u << n) - 1)), static_cast<uint32_t>(i >> n)}; };
  auto rot_sign = [n](WordXZ p, WordXZ a, WordXZ& out) {
    out = {p.x ^ a.x, p.z ^ a.z};
    return (product_phase(p, a, n) + 1) % 4 == 0 ? 1.0 : -1.0;
  };
  double total = 0.0;
  std::vector<double> v(dim), next(dim);
  for (uint32_t dz = 0; dz < half; ++dz) {
    WordXZ d{0, dz};
    std::fill(v.begin(), v.end(), 0.0);
    for (uint32_t z = 0; z < half; ++z) v[idx({0, z})] = 1.0;
    for (const TwoCopyOp& op : ops) {
      std::fill(next.begin(), next.end(), 0.0);
      if (op.cz) {
        double unused = 1.0;
        WordXZ d2 = d;
        cz_conjugate(d2, unused, op.q, op.r);
        for (std::size_t i = 0; i < dim; ++i) {
          if (v[i] == 0.0) continue;
          WordXZ a = word(i), b{a.x ^ d.x, a.z ^ d.z};
          double sa = 1.0, sb = 1.0;
          cz_conjugate(a, sa, op.q, op.r);
          cz_conjugate(b, sb, op.q, op.r);
          next[idx(a)] += sa * sb * v[i];
        }
        d = d2;
      } else {
        if (anticommute(op.axis, d)) {
          std::fill(v.begin(), v.end(), 0.0);
          break;
        }
        for (std::size_t i = 0; i < dim; ++i) {
          if (v[i] == 0.0) continue;
          const WordXZ a = word(i);
          if (!anticommute(op.axis, a)) {
            next[i] += v[i];
            continue;
          }
          const WordXZ b{a.x ^ d.x, a.z ^ d.z};
          WordXZ a2, b2;
          const double s = rot_sign(op.axis, a, a2) * rot_sign(op.axis, b, b2);
          next[i] += 0.5 * v[i];
          next[idx(a2)] += 0.5 * s * v[i];
        }
      }
      v.swap(next);
    }
    for (double c : v) total += c * c;
  }
  return total / static_cast<double>(dim);
}

// Ring of n qubits, per block: R_X layer, CZ on even then odd edges, R_Z layer.
inline std::vector<TwoCopyOp> ring_ref(unsigned n, unsigned blocks) {
  std::vector<TwoCopyOp> ops;
  for (unsigned b = 0; b < blocks; ++b) {
    for (unsigned q = 0; q < n; ++q) ops.push_back({false, {1u << q, 0}, 0, 0});
    for (unsigned parity = 0; parity < 2; ++parity) {
      for (unsigned q = parity; q < n; q += 2) ops.push_back({true, {}, q, (q + 1) % n});
    }
    for (unsigned q = 0; q < n; ++q) ops.push_back({false, {0, 1u << q}, 0, 0});
  }
  return ops;
}

inline double haar_frame_potential(unsigned n) {
  const double d = static_cast<double>(1u << n);
  return 2.0 / (d * (d + 1.0));
}

}  // namespace ref
