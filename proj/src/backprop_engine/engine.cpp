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

#include "obppp/engine.hpp"

#include <cmath>
#include <stdexcept>

#include "obppp/errors.hpp"

namespace obppp {

void PathState::load(const PauliString& p, double w) {
  x.assign(p.x(), p.x() + p.num_words());
  z.assign(p.z(), p.z() + p.num_words());
  phase = 0;
  weight = w;
}

Engine::Engine(const Circuit& circuit, const SparseState& state)
    : circuit_(circuit), state_(state) {
  circuit_.validate();
  if (state_.n() != circuit_.n()) throw DimensionError("state and circuit sizes differ");
  const auto& ops = circuit_.ops();
  const auto& sites = circuit_.noise_sites();
  // Sites are stable-sorted by position so equal positions keep file order.
  std::vector<std::vector<uint32_t>> after(ops.size() + 1);
  for (uint32_t s = 0; s < sites.size(); ++s) after[sites[s].position].push_back(s);
  auto emit_sites = [&](std::size_t pos) {
    for (uint32_t s : after[pos]) {
      const PtmChannel& ch = sites[s].channel;
      Instr in;
      in.site = s;
      in.ch = &ch;
      in.tracked = ch.spec().kind == "depolarizing";
      if (ch.is_closed_form()) {
        in.kind = Instr::NoiseUniform;
      } else if (ch.is_diagonal() && ch.m() == 1) {
        in.kind = Instr::NoiseDiag1;
        in.a = static_cast<uint32_t>(ch.support()[0]);
        for (int c = 0; c < 4; ++c) in.diag1[c] = ch.diag(c);
      } else if (ch.is_diagonal()) {
        in.kind = Instr::NoiseDiag;
      } else {
        in.kind = Instr::NoiseBranch;
        deterministic_ = false;
      }
      tape_.push_back(in);
    }
  };
  emit_sites(0);
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const GateOp& op = ops[i];
    Instr in;
    if (op.type == GateOp::Type::Rotation) {
      in.kind = Instr::Rotation;
      in.axis = &op.axis;
      in.param = op.param;
      in.fixed_k = op.fixed_k;
    } else {
      in.kind = Instr::Clifford;
      in.ck = op.kind;
      in.a = static_cast<uint32_t>(op.qubits[0]);
      in.b = static_cast<uint32_t>(op.qubits.size() > 1 ? op.qubits[1] : op.qubits[0]);
    }
    tape_.push_back(in);
    emit_sites(i + 1);
  }
}

uint32_t Engine::local_index(const Instr& in, const PathState& s) const {
  const auto& sup = in.ch->support();
  uint32_t idx = 0;
  for (std::size_t j = 0; j < sup.size(); ++j) {
    idx |= uint32_t{get_code(s.x.data(), s.z.data(), sup[j])} << (2 * j);
  }
  return idx;
}

void Engine::write_local(const Instr& in, PathState& s, uint32_t idx) const {
  const auto& sup = in.ch->support();
  for (std::size_t j = 0; j < sup.size(); ++j) {
    set_code(s.x.data(), s.z.data(), sup[j], (idx >> (2 * j)) & 3);
  }
}

namespace {
bool support_nontrivial(const std::vector<std::size_t>& sup, const PathState& s) {
  for (std::size_t q : sup) {
    if (get_bit(s.x.data(), q) | get_bit(s.z.data(), q)) return true;
  }
  return false;
}
}  // namespace

double Engine::finish(const PathState& s) const {
  if (s.phase & 1) throw std::logic_error("Pauli path ended with an imaginary phase");
  return s.weight * state_.trace_unnormalized(s.x.data(), s.z.data(), s.phase & 3);
}

double Engine::walk_back(const Theta& theta, PathState& s, RngStream* rng,
                         std::vector<uint32_t>* taus) const {
  uint64_t* x = s.x.data();
  uint64_t* z = s.z.data();
  for (std::size_t i = tape_.size(); i-- > 0;) {
    const Instr& in = tape_[i];
    switch (in.kind) {
      case Instr::Clifford:
        clifford_backprop_inplace(in.ck, in.a, in.b, x, z, s.phase);
        break;
      case Instr::Rotation:
        rotation_backprop_inplace(*in.axis, in.param >= 0 ? theta[in.param] : in.fixed_k, x, z,
                                  s.phase);
        break;
      case Instr::NoiseDiag1:
        s.weight *= in.diag1[get_code(x, z, in.a)];
        if (s.weight == 0.0) return 0.0;
        break;
      case Instr::NoiseDiag:
        s.weight *= in.ch->diag(local_index(in, s));
        if (s.weight == 0.0) return 0.0;
        break;
      case Instr::NoiseUniform:
        if (support_nontrivial(in.ch->support(), s)) {
          s.weight *= 1.0 - in.ch->closed_form_lambda();
          if (s.weight == 0.0) return 0.0;
        }
        break;
      case Instr::NoiseBranch: {
        const uint32_t idx = local_index(in, s);
        if (in.ch->column_support(idx) == 1 && in.ch->column_l1(idx) == 1.0 &&
            in.ch->entry(idx, idx) == 1.0) {
          if (taus) taus->push_back(idx);
          break;  // identity column, nothing to draw
        }
        const AdjointSample smp = in.ch->adjoint_sample(idx, rng->uniform());
        if (smp.terminal) return 0.0;
        s.weight *= smp.weight;
        if (smp.tau != idx) write_local(in, s, smp.tau);
        if (taus) taus->push_back(smp.tau);
        break;
      }
    }
  }
  return finish(s);
}

double Engine::walk_back_noiseless(const Theta& theta, PathState& s) const {
  uint64_t* x = s.x.data();
  uint64_t* z = s.z.data();
  for (std::size_t i = tape_.size(); i-- > 0;) {
    const Instr& in = tape_[i];
    if (in.kind == Instr::Clifford) {
      clifford_backprop_inplace(in.ck, in.a, in.b, x, z, s.phase);
    } else if (in.kind == Instr::Rotation) {
      rotation_backprop_inplace(*in.axis, in.param >= 0 ? theta[in.param] : in.fixed_k, x, z,
                                s.phase);
    }
  }
  return finish(s);
}

double Engine::walk_back_tracked(const Theta& theta, PathState& s, RngStream* rng,
                                 std::vector<TrackedFactor>& tracked) const {
  tracked.clear();
  uint64_t* x = s.x.data();
  uint64_t* z = s.z.data();
  for (std::size_t i = tape_.size(); i-- > 0;) {
    const Instr& in = tape_[i];
    switch (in.kind) {
      case Instr::Clifford:
        clifford_backprop_inplace(in.ck, in.a, in.b, x, z, s.phase);
        break;
      case Instr::Rotation:
        rotation_backprop_inplace(*in.axis, in.param >= 0 ? theta[in.param] : in.fixed_k, x, z,
                                  s.phase);
        break;
      case Instr::NoiseDiag1:
      case Instr::NoiseDiag:
      case Instr::NoiseUniform: {
        double f = 1.0;
        bool nontrivial;
        if (in.kind == Instr::NoiseDiag1) {
          const uint8_t c = get_code(x, z, in.a);
          nontrivial = c != kI;
          f = in.diag1[c];
        } else if (in.kind == Instr::NoiseDiag) {
          const uint32_t idx = local_index(in, s);
          nontrivial = idx != 0;
          f = in.ch->diag(idx);
        } else {
          nontrivial = support_nontrivial(in.ch->support(), s);
          f = nontrivial ? 1.0 - in.ch->closed_form_lambda() : 1.0;
        }
        if (in.tracked) {
          if (nontrivial) tracked.push_back({in.site, f});
        } else {
          s.weight *= f;
          if (s.weight == 0.0) return 0.0;
        }
        break;
      }
      case Instr::NoiseBranch: {
        const uint32_t idx = local_index(in, s);
        if (in.ch->column_support(idx) == 1 && in.ch->entry(idx, idx) == 1.0) break;
        const AdjointSample smp = in.ch->adjoint_sample(idx, rng->uniform());
        if (smp.terminal) return 0.0;
        s.weight *= smp.weight;
        if (smp.tau != idx) write_local(in, s, smp.tau);
        break;
      }
    }
  }
  return finish(s);
}

void Engine::walk_forward(const Theta& theta, PathState& s, RngStream* rng) const {
  uint64_t* x = s.x.data();
  uint64_t* z = s.z.data();
  for (std::size_t i = 0; i < tape_.size(); ++i) {
    const Instr& in = tape_[i];
    switch (in.kind) {
      case Instr::Clifford:
        clifford_backprop_inplace(clifford_inverse(in.ck), in.a, in.b, x, z, s.phase);
        break;
      case Instr::Rotation: {
        const uint8_t k = in.param >= 0 ? theta[in.param] : in.fixed_k;
        rotation_backprop_inplace(*in.axis, (4 - k) & 3, x, z, s.phase);
        break;
      }
      case Instr::NoiseDiag1:
        s.weight *= in.diag1[get_code(x, z, in.a)];
        break;
      case Instr::NoiseDiag:
        s.weight *= in.ch->diag(local_index(in, s));
        break;
      case Instr::NoiseUniform:
        if (support_nontrivial(in.ch->support(), s)) s.weight *= 1.0 - in.ch->closed_form_lambda();
        break;
      case Instr::NoiseBranch: {
        const uint32_t idx = local_index(in, s);
        if (in.ch->row_support(idx) == 1 && in.ch->entry(idx, idx) == 1.0) break;
        const AdjointSample smp = in.ch->forward_sample(idx, rng->uniform());
        if (smp.terminal) {
          s.weight = 0.0;
          return;
        }
        s.weight *= smp.weight;
        if (smp.tau != idx) write_local(in, s, smp.tau);
        break;
      }
    }
    if (s.weight == 0.0) return;
  }
}

double Engine::enumerate_from(const Theta& theta, PathState s, std::size_t pos, std::size_t cap,
                              std::size_t& leaves) const {
  uint64_t* x = s.x.data();
  uint64_t* z = s.z.data();
  for (std::size_t i = pos; i-- > 0;) {
    const Instr& in = tape_[i];
    switch (in.kind) {
      case Instr::Clifford:
        clifford_backprop_inplace(in.ck, in.a, in.b, x, z, s.phase);
        break;
      case Instr::Rotation:
        rotation_backprop_inplace(*in.axis, in.param >= 0 ? theta[in.param] : in.fixed_k, x, z,
                                  s.phase);
        break;
      case Instr::NoiseDiag1:
        s.weight *= in.diag1[get_code(x, z, in.a)];
        break;
      case Instr::NoiseDiag:
        s.weight *= in.ch->diag(local_index(in, s));
        break;
      case Instr::NoiseUniform:
        if (support_nontrivial(in.ch->support(), s)) s.weight *= 1.0 - in.ch->closed_form_lambda();
        break;
      case Instr::NoiseBranch: {
        const auto branches = in.ch->adjoint_branches(local_index(in, s));
        if (branches.empty()) return 0.0;
        if (branches.size() == 1) {
          s.weight *= branches[0].second;
          write_local(in, s, branches[0].first);
          break;
        }
        double total = 0.0;
        for (const auto& [tau, v] : branches) {
          PathState child = s;
          child.weight *= v;
          write_local(in, child, tau);
          total += enumerate_from(theta, std::move(child), i, cap, leaves);
        }
        return total;
      }
    }
    if (s.weight == 0.0) return 0.0;
  }
  if (++leaves > cap) {
    throw CapExceeded("exact enumeration needs more than " + std::to_string(cap) +
                      " branches; fall back to sampling");
  }
  return finish(s);
}

double Engine::enumerate_back(const Theta& theta, const PathState& s, std::size_t branch_cap,
                              std::size_t& leaves) const {
  return enumerate_from(theta, s, tape_.size(), branch_cap, leaves);
}

PathSample Engine::backprop_term(const Theta& theta, const ObservableSum::Term& term,
                                 RngStream* rng, bool record) const {
  if (theta.size() != circuit_.n_params()) throw DimensionError("theta length differs from N_g");
  if (!deterministic_ && rng == nullptr) throw std::logic_error("sampling walk needs an RNG");
  PathState s;
  s.load(term.pauli, term.coeff);
  PathSample out;
  out.value = walk_back(theta, s, rng, record ? &out.taus : nullptr);
  out.terminal = s.weight == 0.0;
  return out;
}

namespace {
thread_local PathState tl_state;
}

InnerEstimate estimate_expectation(const Engine& e, const ObservableSum& obs, const Theta& theta,
                                   std::size_t n_tau, uint64_t seed, uint64_t key) {
  if (n_tau < 1) throw ValidationError("n_tau must be at least 1");
  if (theta.size() != e.circuit().n_params()) throw DimensionError("theta length differs from N_g");
  InnerEstimate r;
  r.n_tau = e.deterministic() ? 1 : n_tau;
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < r.n_tau; ++i) {
    double v = 0.0;
    for (std::size_t h = 0; h < obs.terms().size(); ++h) {
      tl_state.load(obs.terms()[h].pauli, obs.terms()[h].coeff);
      if (e.deterministic()) {
        v += e.walk_back(theta, tl_state, nullptr);
      } else {
        RngStream rng(seed, stream_key({key, i, h}));
        v += e.walk_back(theta, tl_state, &rng);
      }
    }
    sum += v;
    sum2 += v * v;
  }
  const double nt = static_cast<double>(r.n_tau);
  r.mean = sum / nt;
  if (r.n_tau > 1) {
    const double var = std::max(0.0, (sum2 - sum * sum / nt) / (nt - 1.0));
    r.stderr_ = std::sqrt(var / nt);
  }
  return r;
}

double expectation_mean(const Engine& e, const ObservableSum& obs, const Theta& theta,
                        std::size_t n_tau, uint64_t seed, uint64_t key) {
  const std::size_t nt = e.deterministic() ? 1 : n_tau;
  double sum = 0.0;
  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t h = 0; h < obs.terms().size(); ++h) {
      tl_state.load(obs.terms()[h].pauli, obs.terms()[h].coeff);
      if (e.deterministic()) {
        sum += e.walk_back(theta, tl_state, nullptr);
      } else {
        RngStream rng(seed, stream_key({key, i, h}));
        sum += e.walk_back(theta, tl_state, &rng);
      }
    }
  }
  return sum / static_cast<double>(nt);
}

double noiseless_expectation(const Engine& e, const ObservableSum& obs, const Theta& theta) {
  double sum = 0.0;
  for (const auto& t : obs.terms()) {
    tl_state.load(t.pauli, t.coeff);
    sum += e.walk_back_noiseless(theta, tl_state);
  }
  return sum;
}

double enumerate_expectation_exact(const Engine& e, const ObservableSum& obs, const Theta& theta,
                                   std::size_t branch_cap) {
  if (theta.size() != e.circuit().n_params()) throw DimensionError("theta length differs from N_g");
  std::size_t leaves = 0;
  double sum = 0.0;
  for (const auto& t : obs.terms()) {
    PathState s;
    s.load(t.pauli, t.coeff);
    sum += e.enumerate_back(theta, s, branch_cap, leaves);
  }
  return sum;
}

Theta sample_theta(RngStream& rng, std::size_t n_params) {
  Theta t(n_params);
  uint64_t bits = 0;
  for (std::size_t i = 0; i < n_params; ++i) {
    if (i % 32 == 0) bits = rng.next_u64();
    t[i] = bits & 3;
    bits >>= 2;
  }
  return t;
}

PauliString sample_pauli(RngStream& rng, std::size_t n, bool z_only) {
  PauliString p(n);
  for (std::size_t w = 0; w < p.num_words(); ++w) {
    const std::size_t live = std::min<std::size_t>(64, n - 64 * w);
    const uint64_t mask = live == 64 ? ~uint64_t{0} : ((uint64_t{1} << live) - 1);
    p.z()[w] = rng.next_u64() & mask;
    if (!z_only) p.x()[w] = rng.next_u64() & mask;
  }
  return p;
}

}  // namespace obppp
