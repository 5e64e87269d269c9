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

#include "obppp/channels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "obppp/errors.hpp"

namespace obppp {

namespace {

std::size_t pow4(std::size_t m) { return std::size_t{1} << (2 * m); }

uint8_t digit(std::size_t idx, std::size_t j) { return (idx >> (2 * j)) & 3; }

void check_support(const std::vector<std::size_t>& support, std::size_t min_m, std::size_t max_m,
                   const std::string& what) {
  if (support.size() < min_m || support.size() > max_m) {
    throw ValidationError(what + " needs support of size " + std::to_string(min_m) +
                          (max_m == min_m ? "" : ".." + std::to_string(max_m)) + ", got " +
                          std::to_string(support.size()));
  }
  std::set<std::size_t> seen(support.begin(), support.end());
  if (seen.size() != support.size()) throw ValidationError(what + " support repeats a qubit");
}

void check_unit(double v, const std::string& name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ValidationError(name + " must lie in [0, 1], got " + std::to_string(v));
  }
}

// True when the single-qubit Paulis a, b anticommute.
bool anti1(uint8_t a, uint8_t b) { return a != kI && b != kI && a != b; }

bool anti_local(std::size_t a, std::size_t b, std::size_t m) {
  unsigned par = 0;
  for (std::size_t j = 0; j < m; ++j) par ^= anti1(digit(a, j), digit(b, j));
  return par & 1;
}

}  // namespace

std::size_t local_index_of(const PauliString& p, const std::vector<std::size_t>& support) {
  std::size_t idx = 0;
  for (std::size_t j = 0; j < support.size(); ++j) idx |= std::size_t{p.get(support[j])} << (2 * j);
  return idx;
}

std::string local_label(std::size_t idx, std::size_t m) {
  std::string s(m, 'I');
  for (std::size_t j = 0; j < m; ++j) s[j] = code_char(digit(idx, j));
  return s;
}

std::size_t parse_local_label(std::string_view text) {
  const PauliString p = PauliString::parse(text);
  std::size_t idx = 0;
  for (std::size_t j = 0; j < p.n(); ++j) idx |= std::size_t{p.get(j)} << (2 * j);
  return idx;
}

PtmChannel::Alias PtmChannel::build_alias(const std::vector<std::pair<uint32_t, double>>& entries) {
  Alias a;
  for (const auto& [t, v] : entries) {
    if (v == 0.0) continue;
    a.tau.push_back(t);
    a.sign.push_back(v > 0 ? 1.0 : -1.0);
    a.prob.push_back(std::abs(v));
    a.l1 += std::abs(v);
  }
  const std::size_t k = a.tau.size();
  a.alias.assign(k, 0);
  if (k == 0) return a;
  // Vose's method on probabilities scaled by k.
  std::vector<double> scaled(k);
  for (std::size_t i = 0; i < k; ++i) scaled[i] = a.prob[i] / a.l1 * static_cast<double>(k);
  std::vector<uint32_t> small, large;
  for (std::size_t i = 0; i < k; ++i) (scaled[i] < 1.0 ? small : large).push_back(i);
  while (!small.empty() && !large.empty()) {
    const uint32_t s = small.back(), l = large.back();
    small.pop_back();
    a.alias[s] = l;
    scaled[l] -= 1.0 - scaled[s];
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (uint32_t i : large) scaled[i] = 1.0;
  for (uint32_t i : small) scaled[i] = 1.0;
  a.prob = std::move(scaled);
  return a;
}

AdjointSample PtmChannel::draw(const Alias& a, double u) {
  const std::size_t k = a.tau.size();
  if (k == 0) return {0, 0.0, true};
  const double scaled = u * static_cast<double>(k);
  std::size_t j = std::min(static_cast<std::size_t>(scaled), k - 1);
  const double frac = scaled - static_cast<double>(j);
  if (frac >= a.prob[j]) j = a.alias[j];
  return {a.tau[j], a.sign[j] * a.l1, false};
}

PtmChannel PtmChannel::from_matrix(std::vector<std::size_t> support, std::vector<double> ptm,
                                   std::string label, ChannelSpec spec) {
  if (support.empty() || support.size() > kMaxDenseSupport) {
    throw ValidationError("channel support must have 1.." + std::to_string(kMaxDenseSupport) +
                          " qubits, got " + std::to_string(support.size()));
  }
  PtmChannel ch;
  ch.support_ = std::move(support);
  ch.dim_ = pow4(ch.support_.size());
  if (ptm.size() != ch.dim_ * ch.dim_) {
    throw ValidationError("PTM for " + std::to_string(ch.support_.size()) + " qubit(s) needs " +
                          std::to_string(ch.dim_ * ch.dim_) + " entries, got " +
                          std::to_string(ptm.size()));
  }
  for (double v : ptm) {
    if (!std::isfinite(v)) throw ValidationError("PTM entry is not finite");
  }
  ch.ptm_ = std::move(ptm);
  ch.label_ = std::move(label);
  ch.spec_ = std::move(spec);
  ch.spec_.support = ch.support_;
  const std::size_t d = ch.dim_;
  ch.col_.resize(d);
  ch.row_.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<std::pair<uint32_t, double>> col, row;
    for (std::size_t i = 0; i < d; ++i) {
      col.emplace_back(i, ch.ptm_[i * d + j]);
      row.emplace_back(i, ch.ptm_[j * d + i]);
      if (i != j && ch.ptm_[i * d + j] != 0.0) ch.diagonal_ = false;
    }
    ch.col_[j] = build_alias(col);
    ch.row_[j] = build_alias(row);
  }
  ch.flags_ = validate(ch);
  return ch;
}

PtmChannel PtmChannel::uniform_depolarizing(std::vector<std::size_t> support, double lambda) {
  check_unit(lambda, "depolarizing lambda");
  PtmChannel ch;
  ch.support_ = std::move(support);
  ch.dim_ = 0;  // not materialized
  ch.closed_form_ = true;
  ch.cf_lambda_ = lambda;
  ch.diagonal_ = true;
  ch.label_ = "depolarizing(" + std::to_string(lambda) + ")";
  ch.spec_.kind = "depolarizing";
  ch.spec_.support = ch.support_;
  ch.spec_.params["lambda"] = lambda;
  ch.flags_ = {true, true, true};
  return ch;
}

double PtmChannel::entry(std::size_t i, std::size_t j) const {
  if (closed_form_) return i == j ? diag(i) : 0.0;
  return ptm_[i * dim_ + j];
}

std::vector<std::pair<uint32_t, double>> PtmChannel::adjoint_branches(uint32_t s_local) const {
  if (closed_form_) {
    const double d = diag(s_local);
    if (d == 0.0) return {};
    return {{s_local, d}};
  }
  std::vector<std::pair<uint32_t, double>> out;
  for (std::size_t i = 0; i < dim_; ++i) {
    const double v = ptm_[i * dim_ + s_local];
    if (v != 0.0) out.emplace_back(i, v);
  }
  return out;
}

std::vector<std::pair<uint32_t, double>> PtmChannel::forward_branches(uint32_t s_local) const {
  if (closed_form_) return adjoint_branches(s_local);
  std::vector<std::pair<uint32_t, double>> out;
  for (std::size_t j = 0; j < dim_; ++j) {
    const double v = ptm_[s_local * dim_ + j];
    if (v != 0.0) out.emplace_back(j, v);
  }
  return out;
}

ChannelFlags validate(const PtmChannel& ch) {
  if (ch.is_closed_form()) return {true, true, true};
  const std::size_t d = ch.dim();
  ChannelFlags f{true, true, true};
  for (std::size_t j = 0; j < d; ++j) {
    double cl = 0.0, rl = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      cl += std::abs(ch.entry(i, j));
      rl += std::abs(ch.entry(j, i));
    }
    if (cl > 1.0 + PtmChannel::kTol) f.pcs1 = false;
    if (rl > 1.0 + PtmChannel::kTol) f.prs1 = false;
  }
  // Trace preservation: E^dagger(I) = I, i.e. column I is the unit vector.
  for (std::size_t i = 0; i < d; ++i) {
    const double want = i == 0 ? 1.0 : 0.0;
    if (std::abs(ch.entry(i, 0) - want) > PtmChannel::kTol) f.tp = false;
  }
  return f;
}

PtmChannel make_depolarizing(double lambda, std::vector<std::size_t> support) {
  check_unit(lambda, "depolarizing lambda");
  check_support(support, 1, 64 * 1024, "depolarizing");
  if (support.size() > PtmChannel::kMaxDenseSupport) {
    return PtmChannel::uniform_depolarizing(std::move(support), lambda);
  }
  const std::size_t d = pow4(support.size());
  std::vector<double> ptm(d * d, 0.0);
  ptm[0] = 1.0;
  for (std::size_t i = 1; i < d; ++i) ptm[i * d + i] = 1.0 - lambda;
  ChannelSpec spec{"depolarizing", support, {{"lambda", lambda}}, {}, {}, {}};
  std::ostringstream label;
  label << "depolarizing(" << lambda << ")";
  return PtmChannel::from_matrix(std::move(support), std::move(ptm), label.str(), spec);
}

PtmChannel make_amplitude_damping(double gamma, std::vector<std::size_t> support) {
  check_unit(gamma, "amplitude damping gamma");
  check_support(support, 1, 1, "amplitude damping");
  const double r = std::sqrt(1.0 - gamma);
  std::vector<double> ptm = {1.0, 0, 0, gamma,  //
                             0,   r, 0, 0,      //
                             0,   0, r, 0,      //
                             0,   0, 0, 1.0 - gamma};
  ChannelSpec spec{"amplitude_damping", support, {{"gamma", gamma}}, {}, {}, {}};
  std::ostringstream label;
  label << "amplitude_damping(" << gamma << ")";
  return PtmChannel::from_matrix(std::move(support), std::move(ptm), label.str(), spec);
}

PtmChannel make_thermal(double gamma, double lambda, std::vector<std::size_t> support) {
  if (!(gamma >= 0.0) || !(lambda >= 0.0)) {
    throw ValidationError("thermal gamma and lambda must be non-negative");
  }
  if (gamma + lambda > 1.0 + PtmChannel::kTol) {
    throw ValidationError("thermal channel needs lambda + gamma <= 1");
  }
  check_support(support, 1, 1, "thermal relaxation");
  const double r = std::sqrt(std::max(0.0, 1.0 - lambda - gamma));
  std::vector<double> ptm = {1.0, 0, 0, gamma,  //
                             0,   r, 0, 0,      //
                             0,   0, r, 0,      //
                             0,   0, 0, 1.0 - gamma};
  ChannelSpec spec{"thermal", support, {{"gamma", gamma}, {"lambda", lambda}}, {}, {}, {}};
  std::ostringstream label;
  label << "thermal(gamma=" << gamma << ", lambda=" << lambda << ")";
  return PtmChannel::from_matrix(std::move(support), std::move(ptm), label.str(), spec);
}

std::pair<double, double> thermal_from_times(double t1, double t2, double t) {
  if (!(t1 > 0.0) || !(t2 > 0.0) || !(t >= 0.0)) {
    throw ValidationError("thermal times need T1 > 0, T2 > 0, t >= 0");
  }
  if (t2 > 2.0 * t1) throw ValidationError("thermal relaxation needs T2 <= 2 T1");
  const double gamma = 1.0 - std::exp(-t / t1);
  // Coherences decay as exp(-t / T2) = sqrt(1 - lambda - gamma).
  const double lambda = std::exp(-t / t1) - std::exp(-2.0 * t / t2);
  if (lambda < -PtmChannel::kTol || gamma + lambda > 1.0 + PtmChannel::kTol) {
    throw ValidationError("thermal relaxation times give lambda outside [0, 1 - gamma]");
  }
  return {gamma, std::max(0.0, lambda)};
}

PtmChannel make_pauli_channel(const std::map<std::string, double>& probs,
                              std::vector<std::size_t> support) {
  check_support(support, 1, PtmChannel::kMaxDenseSupport, "Pauli channel");
  const std::size_t m = support.size();
  const std::size_t d = pow4(m);
  std::vector<double> p(d, 0.0);
  double total = 0.0;
  for (const auto& [label, v] : probs) {
    if (label.size() != m) {
      throw ValidationError("Pauli channel key '" + label + "' must have length " +
                            std::to_string(m));
    }
    if (!(v >= 0.0)) throw ValidationError("Pauli channel probability must be non-negative");
    p[parse_local_label(label)] += v;
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ValidationError("Pauli channel probabilities sum to " + std::to_string(total));
  }
  std::vector<double> ptm(d * d, 0.0);
  for (std::size_t s = 0; s < d; ++s) {
    double acc = 0.0;
    for (std::size_t i = 0; i < d; ++i) acc += anti_local(s, i, m) ? -p[i] : p[i];
    ptm[s * d + s] = acc;
  }
  ChannelSpec spec{"pauli", support, {}, probs, {}, {}};
  return PtmChannel::from_matrix(std::move(support), std::move(ptm), "pauli", spec);
}

PtmChannel make_mmff(const PauliString& feedback, std::vector<std::size_t> support) {
  check_support(support, 2, PtmChannel::kMaxDenseSupport, "measurement feed-forward");
  const std::size_t m = support.size();
  if (feedback.n() != m - 1) {
    throw ValidationError("feedback Pauli must cover the " + std::to_string(m - 1) +
                          " target qubit(s)");
  }
  std::size_t fb = 0;
  for (std::size_t j = 0; j + 1 < m; ++j) fb |= std::size_t{feedback.get(j)} << (2 * j);
  const std::size_t d = pow4(m);
  std::vector<double> ptm(d * d, 0.0);
  for (std::size_t col = 0; col < d; ++col) {
    if (digit(col, 0) != kI) continue;  // X/Y/Z on the reset qubit are erased
    const std::size_t s = col >> 2;
    const std::size_t row = anti_local(s, fb, m - 1) ? (col | kZ) : col;
    ptm[row * d + col] = 1.0;
  }
  ChannelSpec spec{"mmff", support, {}, {}, feedback.str(), {}};
  return PtmChannel::from_matrix(std::move(support), std::move(ptm),
                                 "mmff(" + feedback.str() + ")", spec);
}

PtmChannel make_raw_ptm(std::vector<double> ptm, std::vector<std::size_t> support) {
  check_support(support, 1, PtmChannel::kMaxDenseSupport, "ptm channel");
  ChannelSpec spec{"ptm", support, {}, {}, {}, ptm};
  return PtmChannel::from_matrix(std::move(support), std::move(ptm), "ptm", spec);
}

namespace {
double need(const ChannelSpec& s, const std::string& key) {
  auto it = s.params.find(key);
  if (it == s.params.end()) throw ValidationError(s.kind + " channel needs parameter '" + key + "'");
  return it->second;
}
}  // namespace

PtmChannel build_channel(const ChannelSpec& s) {
  if (s.kind == "depolarizing") return make_depolarizing(need(s, "lambda"), s.support);
  if (s.kind == "amplitude_damping") return make_amplitude_damping(need(s, "gamma"), s.support);
  if (s.kind == "thermal") {
    if (s.params.count("t1")) {
      const auto [g, l] = thermal_from_times(need(s, "t1"), need(s, "t2"), need(s, "t"));
      PtmChannel ch = make_thermal(g, l, s.support);
      ChannelSpec keep = s;
      keep.params["gamma"] = g;
      keep.params["lambda"] = l;
      return PtmChannel::from_matrix(ch.support(), [&] {
        std::vector<double> v(16);
        for (std::size_t i = 0; i < 4; ++i)
          for (std::size_t j = 0; j < 4; ++j) v[i * 4 + j] = ch.entry(i, j);
        return v;
      }(), ch.label(), keep);
    }
    return make_thermal(need(s, "gamma"), need(s, "lambda"), s.support);
  }
  if (s.kind == "pauli") return make_pauli_channel(s.pauli_probs, s.support);
  if (s.kind == "mmff") return make_mmff(PauliString::parse(s.feedback), s.support);
  if (s.kind == "ptm") return make_raw_ptm(s.raw_ptm, s.support);
  throw ValidationError("unknown channel kind '" + s.kind + "'");
}

PtmChannel with_param(const PtmChannel& ch, const std::string& name, double value) {
  ChannelSpec s = ch.spec();
  if (s.kind == "thermal" && s.params.count("t1")) {
    s.params.erase("t1");
    s.params.erase("t2");
    s.params.erase("t");
  }
  if (!s.params.count(name)) {
    throw ValidationError("channel " + ch.label() + " has no parameter '" + name + "'");
  }
  s.params[name] = value;
  return build_channel(s);
}

std::string default_noise_param(const std::string& kind) {
  if (kind == "depolarizing") return "lambda";
  if (kind == "amplitude_damping" || kind == "thermal") return "gamma";
  return "";
}

}  // namespace obppp
