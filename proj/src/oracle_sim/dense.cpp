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

#include <algorithm>
#include <bit>
#include <cmath>

#include "obppp/errors.hpp"
#include "obppp/oracle.hpp"

namespace obppp {

using cd = std::complex<double>;

namespace {

constexpr cd kIm{0.0, 1.0};

// i^k for k mod 4.
cd ipow(unsigned k) {
  switch (k & 3) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

// 2x2 Pauli matrix entry <r|sigma_code|c>.
cd pauli_entry(uint8_t code, unsigned r, unsigned c) {
  switch (code) {
    case kI: return r == c ? cd{1, 0} : cd{0, 0};
    case kX: return r != c ? cd{1, 0} : cd{0, 0};
    case kY: return r == c ? cd{0, 0} : (r == 0 ? cd{0, -1} : cd{0, 1});
    default: return r == c ? (r == 0 ? cd{1, 0} : cd{-1, 0}) : cd{0, 0};
  }
}

// Masks of a Pauli word restricted to n <= 63 qubits.
struct Masks {
  uint64_t x = 0, z = 0;
};

Masks masks_of(const SparseAxis& axis) {
  Masks m;
  for (const auto& [q, c] : axis.ops) {
    if (code_x(c)) m.x |= uint64_t{1} << q;
    if (code_z(c)) m.z |= uint64_t{1} << q;
  }
  return m;
}

// <a xor x| P |a> = i^{|x&z|} (-1)^{|z&a|}.
cd pauli_phase(const Masks& m, uint64_t a) {
  const unsigned y = std::popcount(m.x & m.z);
  const unsigned s = std::popcount(m.z & a) & 1;
  return ipow(y + 2 * s);
}

std::vector<cd> clifford_matrix(CliffordKind k) {
  const double r = 1.0 / std::sqrt(2.0);
  switch (k) {
    case CliffordKind::I: return {1, 0, 0, 1};
    case CliffordKind::X: return {0, 1, 1, 0};
    case CliffordKind::Y: return {0, -kIm, kIm, 0};
    case CliffordKind::Z: return {1, 0, 0, -1};
    case CliffordKind::H: return {r, r, r, -r};
    case CliffordKind::S: return {1, 0, 0, kIm};
    case CliffordKind::Sdg: return {1, 0, 0, -kIm};
    case CliffordKind::CX: {
      // local index = bit(control) + 2 bit(target)
      std::vector<cd> u(16, 0.0);
      for (unsigned l = 0; l < 4; ++l) {
        const unsigned c = l & 1, t = (l >> 1) & 1;
        u[(c | ((t ^ c) << 1)) * 4 + l] = 1.0;
      }
      return u;
    }
    case CliffordKind::CZ: {
      std::vector<cd> u(16, 0.0);
      for (unsigned l = 0; l < 4; ++l) u[l * 4 + l] = l == 3 ? -1.0 : 1.0;
      return u;
    }
    case CliffordKind::SWAP: {
      std::vector<cd> u(16, 0.0);
      for (unsigned l = 0; l < 4; ++l) u[(((l & 1) << 1) | (l >> 1)) * 4 + l] = 1.0;
      return u;
    }
  }
  throw std::logic_error("unknown Clifford kind");
}

// Scatter the local bits of `loc` onto the qubit positions of `qubits`.
uint64_t scatter(unsigned loc, const std::vector<std::size_t>& qubits) {
  uint64_t r = 0;
  for (std::size_t j = 0; j < qubits.size(); ++j) {
    if ((loc >> j) & 1) r |= uint64_t{1} << qubits[j];
  }
  return r;
}

uint64_t mask_of(const std::vector<std::size_t>& qubits) {
  uint64_t m = 0;
  for (std::size_t q : qubits) m |= uint64_t{1} << q;
  return m;
}

// Local 2^m x 2^m Pauli matrix for local index idx (code_j at digit j).
std::vector<cd> local_pauli(std::size_t idx, std::size_t m) {
  const std::size_t d = std::size_t{1} << m;
  std::vector<cd> p(d * d);
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      cd v = 1.0;
      for (std::size_t j = 0; j < m && v != 0.0; ++j) {
        v *= pauli_entry((idx >> (2 * j)) & 3, (r >> j) & 1, (c >> j) & 1);
      }
      p[r * d + c] = v;
    }
  }
  return p;
}

}  // namespace

DenseState::DenseState(std::size_t n) : n_(n), dim_(std::size_t{1} << n), a_(dim_ * dim_) {
  if (n > 14) throw CapExceeded("dense state limited to 14 qubits");
}

DenseState DenseState::from_sparse(const SparseState& s) {
  DenseState d(s.n());
  for (const auto& e : s.entries()) {
    const uint64_t r = e.row.empty() ? 0 : e.row[0];
    const uint64_t c = e.col.empty() ? 0 : e.col[0];
    d.at(r, c) += e.amp;
  }
  return d;
}

cd DenseState::trace() const {
  cd t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += at(i, i);
  return t;
}

double DenseState::hermiticity_error() const {
  double e = 0.0;
  for (std::size_t r = 0; r < dim_; ++r) {
    for (std::size_t c = r; c < dim_; ++c) e = std::max(e, std::abs(at(r, c) - std::conj(at(c, r))));
  }
  return e;
}

double DenseState::purity() const {
  double p = 0.0;
  for (const cd& v : a_) p += std::norm(v);  // Hermitian: tr(rho^2) = sum |rho_rc|^2
  return p;
}

double DenseState::pauli_expectation(const PauliString& p) const {
  if (p.n() != n_) throw DimensionError("Pauli and state sizes differ");
  Masks m;
  for (const auto& [q, c] : p.sparse()) {
    if (code_x(c)) m.x |= uint64_t{1} << q;
    if (code_z(c)) m.z |= uint64_t{1} << q;
  }
  // tr(P rho) = sum_b <b|P|b^x> rho[b^x][b]
  cd t = 0.0;
  for (uint64_t b = 0; b < dim_; ++b) t += pauli_phase(m, b ^ m.x) * at(b ^ m.x, b);
  return t.real();
}

std::vector<double> DenseState::all_pauli_expectations() const {
  const std::size_t total = dim_ * dim_;
  std::vector<double> out(total);
  std::vector<cd> f(dim_);
  for (uint64_t x = 0; x < dim_; ++x) {
    // tr(P rho) = i^{|x&z|} sum_b (-1)^{z.b} rho[b][b^x]
    for (uint64_t b = 0; b < dim_; ++b) f[b] = at(b, b ^ x);
    for (std::size_t h = 1; h < dim_; h <<= 1) {
      for (std::size_t i = 0; i < dim_; i += 2 * h) {
        for (std::size_t j = i; j < i + h; ++j) {
          const cd u = f[j], v = f[j + h];
          f[j] = u + v;
          f[j + h] = u - v;
        }
      }
    }
    for (uint64_t z = 0; z < dim_; ++z) {
      std::size_t idx = 0;
      for (std::size_t q = 0; q < n_; ++q) {
        idx |= std::size_t{code_from_bits((x >> q) & 1, (z >> q) & 1)} << (2 * q);
      }
      out[idx] = (ipow(std::popcount(x & z)) * f[z]).real();
    }
  }
  return out;
}

void DenseState::apply_rotation(const SparseAxis& axis, double theta) {
  // R rho R^dag = c^2 rho + i c s (rho P - P rho) + s^2 P rho P, R = c - i s P.
  const Masks m = masks_of(axis);
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  std::vector<cd> out(a_.size());
  for (uint64_t r = 0; r < dim_; ++r) {
    const cd pr = pauli_phase(m, r ^ m.x);  // <r|P|r^x>
    for (uint64_t col = 0; col < dim_; ++col) {
      const cd pc = pauli_phase(m, col);  // <col^x|P|col>
      const cd prho = pr * at(r ^ m.x, col);
      const cd rhop = at(r, col ^ m.x) * pc;
      const cd prp = pr * at(r ^ m.x, col ^ m.x) * pc;
      out[r * dim_ + col] = c * c * at(r, col) + kIm * c * s * (rhop - prho) + s * s * prp;
    }
  }
  a_.swap(out);
}

void DenseState::apply_unitary(const std::vector<std::size_t>& qubits, const std::vector<cd>& u) {
  const std::size_t m = qubits.size();
  const std::size_t d = std::size_t{1} << m;
  if (u.size() != d * d) throw DimensionError("unitary size does not match its qubits");
  const uint64_t mask = mask_of(qubits);
  std::vector<uint64_t> off(d);
  for (unsigned l = 0; l < d; ++l) off[l] = scatter(l, qubits);
  std::vector<cd> tmp(d);
  // rho <- U rho, acting on row indices.
  for (uint64_t base = 0; base < dim_; ++base) {
    if (base & mask) continue;
    for (uint64_t col = 0; col < dim_; ++col) {
      for (unsigned l = 0; l < d; ++l) {
        cd acc = 0.0;
        for (unsigned k = 0; k < d; ++k) acc += u[l * d + k] * at(base | off[k], col);
        tmp[l] = acc;
      }
      for (unsigned l = 0; l < d; ++l) at(base | off[l], col) = tmp[l];
    }
  }
  // rho <- rho U^dag, acting on column indices.
  for (uint64_t row = 0; row < dim_; ++row) {
    for (uint64_t base = 0; base < dim_; ++base) {
      if (base & mask) continue;
      for (unsigned l = 0; l < d; ++l) {
        cd acc = 0.0;
        for (unsigned k = 0; k < d; ++k) acc += at(row, base | off[k]) * std::conj(u[l * d + k]);
        tmp[l] = acc;
      }
      for (unsigned l = 0; l < d; ++l) at(row, base | off[l]) = tmp[l];
    }
  }
}

void DenseState::apply_clifford(CliffordKind kind, const std::vector<std::size_t>& qubits) {
  apply_unitary(qubits, clifford_matrix(kind));
}

void DenseState::apply_channel(const PtmChannel& ch) {
  const auto& sup = ch.support();
  const uint64_t mask = mask_of(sup);
  const std::size_t m = sup.size();
  const std::size_t d = std::size_t{1} << m;
  for (std::size_t q : sup) {
    if (q >= n_) throw DimensionError("channel support outside the register");
  }
  // A PTM that is diag(1, 1-l, ..., 1-l) is depolarizing on its support.
  bool uniform = ch.is_closed_form();
  double lam = uniform ? ch.closed_form_lambda() : 0.0;
  if (!uniform && ch.is_diagonal() && ch.entry(0, 0) == 1.0) {
    uniform = true;
    lam = 1.0 - ch.entry(1, 1);
    for (std::size_t i = 2; i < d * d && uniform; ++i) uniform = ch.entry(i, i) == 1.0 - lam;
  }
  if (uniform) {
    // (1 - lambda) rho + lambda I_sup / 2^m (x) tr_sup rho
    std::vector<cd> part(a_.size(), 0.0);
    for (uint64_t r = 0; r < dim_; ++r) {
      for (uint64_t c = 0; c < dim_; ++c) {
        if ((r & mask) == (c & mask)) part[(r & ~mask) * dim_ + (c & ~mask)] += at(r, c);
      }
    }
    for (uint64_t r = 0; r < dim_; ++r) {
      for (uint64_t c = 0; c < dim_; ++c) {
        cd v = (1.0 - lam) * at(r, c);
        if ((r & mask) == (c & mask)) v += lam / static_cast<double>(d) * part[(r & ~mask) * dim_ + (c & ~mask)];
        at(r, c) = v;
      }
    }
    return;
  }
  // Superoperator on a block in the computational basis:
  // out[r][c] = sum_{ij} S_ij tr(P_i blk) P_j[r][c] / d, kept as its
  // non-zero entries (most vanish for the usual channels). A Pauli matrix
  // has one non-zero per row, which keeps the build at O(nnz(S) d^2).
  const std::size_t np = d * d;
  struct Nz {
    std::size_t r, c;
    cd v;
  };
  std::vector<std::vector<Nz>> paulis(np);
  for (std::size_t i = 0; i < np; ++i) {
    const std::vector<cd> full = local_pauli(i, m);
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = 0; c < d; ++c) {
        if (full[r * d + c] != 0.0) paulis[i].push_back({r, c, full[r * d + c]});
      }
    }
  }
  std::vector<cd> dense_super(np * np, 0.0);
  for (std::size_t i = 0; i < np; ++i) {
    for (std::size_t j = 0; j < np; ++j) {
      const double sij = ch.entry(i, j);
      if (sij == 0.0) continue;
      // tr(P_i blk) = sum P_i[c2][r2] blk[r2][c2]
      for (const Nz& a : paulis[i]) {
        const std::size_t in = a.c * d + a.r;
        for (const Nz& b : paulis[j]) dense_super[(b.r * d + b.c) * np + in] += sij * a.v * b.v;
      }
    }
  }
  struct Entry {
    uint32_t out, in;
    cd w;
  };
  std::vector<Entry> super;
  for (std::size_t o = 0; o < np; ++o) {
    for (std::size_t in = 0; in < np; ++in) {
      const cd w = dense_super[o * np + in] / static_cast<double>(d);
      if (std::abs(w) > 1e-15) super.push_back({static_cast<uint32_t>(o), static_cast<uint32_t>(in), w});
    }
  }
  std::vector<uint64_t> off(d);
  for (unsigned l = 0; l < d; ++l) off[l] = scatter(l, sup);
  std::vector<cd> blk(np), outb(np);
  for (uint64_t rb = 0; rb < dim_; ++rb) {
    if (rb & mask) continue;
    for (uint64_t cb = 0; cb < dim_; ++cb) {
      if (cb & mask) continue;
      for (unsigned r = 0; r < d; ++r) {
        for (unsigned c = 0; c < d; ++c) blk[r * d + c] = at(rb | off[r], cb | off[c]);
      }
      std::fill(outb.begin(), outb.end(), cd(0.0));
      for (const Entry& e : super) outb[e.out] += e.w * blk[e.in];
      for (unsigned r = 0; r < d; ++r) {
        for (unsigned c = 0; c < d; ++c) at(rb | off[r], cb | off[c]) = outb[r * d + c];
      }
    }
  }
}

std::vector<double> to_angles(const Theta& theta) {
  std::vector<double> a(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) a[i] = (theta[i] & 3) * (M_PI / 2);
  return a;
}

DenseState dense_evolve(const Circuit& c, const std::vector<double>& angles, const SparseState& rho,
                        const OracleOptions& opt) {
  if (c.n() > opt.max_qubits) {
    throw CapExceeded("dense oracle limited to " + std::to_string(opt.max_qubits) + " qubits, circuit has " +
                      std::to_string(c.n()));
  }
  if (rho.n() != c.n()) throw DimensionError("state and circuit sizes differ");
  if (angles.size() != c.n_params()) throw DimensionError("angle count differs from N_g");
  DenseState d = DenseState::from_sparse(rho);
  const auto& ops = c.ops();
  const auto& sites = c.noise_sites();
  std::vector<std::vector<std::size_t>> after(ops.size() + 1);
  for (std::size_t s = 0; s < sites.size(); ++s) after[sites[s].position].push_back(s);
  auto noise_at = [&](std::size_t pos) {
    if (!opt.noisy) return;
    for (std::size_t s : after[pos]) d.apply_channel(sites[s].channel);
  };
  noise_at(0);
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const GateOp& op = ops[i];
    if (op.type == GateOp::Type::Rotation) {
      const double th = op.param >= 0 ? angles[op.param] : op.fixed_k * (M_PI / 2);
      d.apply_rotation(op.axis, th);
    } else {
      d.apply_clifford(op.kind, op.qubits);
    }
    noise_at(i + 1);
  }
  return d;
}

DenseState dense_evolve(const Circuit& c, const Theta& theta, const SparseState& rho,
                        const OracleOptions& opt) {
  return dense_evolve(c, to_angles(theta), rho, opt);
}

namespace {
double observe(const DenseState& d, const ObservableSum& obs) {
  double v = obs.offset();
  for (const auto& t : obs.terms()) v += t.coeff * d.pauli_expectation(t.pauli);
  return v;
}
}  // namespace

double dense_expectation(const Circuit& c, const std::vector<double>& angles, const ObservableSum& obs,
                         const SparseState& rho, const OracleOptions& opt) {
  if (obs.n() != c.n()) throw DimensionError("observable and circuit sizes differ");
  return observe(dense_evolve(c, angles, rho, opt), obs);
}

double dense_expectation(const Circuit& c, const Theta& theta, const ObservableSum& obs,
                         const SparseState& rho, const OracleOptions& opt) {
  return dense_expectation(c, to_angles(theta), obs, rho, opt);
}

}  // namespace obppp
