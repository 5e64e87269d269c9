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
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "obppp/pauli.hpp"

namespace obppp {

// Everything needed to rebuild a channel, kept for serialization and for
// re-parameterizing a site (bottleneck planning, finite differences).
struct ChannelSpec {
  std::string kind;  // depolarizing | amplitude_damping | thermal | pauli | mmff | ptm
  std::vector<std::size_t> support;
  std::map<std::string, double> params;          // lambda, gamma, t1, t2, t, ...
  std::map<std::string, double> pauli_probs;     // kind == pauli, keys over support
  std::string feedback;                          // kind == mmff, Pauli over targets
  std::vector<double> raw_ptm;                   // kind == ptm, row-major 4^m x 4^m
};

struct ChannelFlags {
  bool pcs1 = false;
  bool prs1 = false;
  bool tp = false;
};

struct AdjointSample {
  uint32_t tau = 0;
  double weight = 0.0;
  bool terminal = false;
};

// Local noise channel on m qubits stored as its PTM over the normalized
// Pauli basis, S(i, j) = tr(E(sigma_i) sigma_j). Local index of a Pauli on
// the support is sum_j code_j 4^j. Column j of S holds the coefficients of
// E^dagger(sigma_j); row i holds those of E(sigma_i).
//
// Depolarizing channels on more than 3 qubits are kept in closed form
// (factor 1 - lambda on every non-identity word) instead of as a matrix.
class PtmChannel {
 public:
  static constexpr std::size_t kMaxDenseSupport = 3;
  static constexpr double kTol = 1e-12;

  PtmChannel() = default;
  // Builds alias tables and flags; does not reject non-PCS1 input.
  static PtmChannel from_matrix(std::vector<std::size_t> support, std::vector<double> ptm,
                                std::string label, ChannelSpec spec);
  static PtmChannel uniform_depolarizing(std::vector<std::size_t> support, double lambda);

  const std::vector<std::size_t>& support() const { return support_; }
  std::size_t m() const { return support_.size(); }
  std::size_t dim() const { return dim_; }
  const std::string& label() const { return label_; }
  const ChannelSpec& spec() const { return spec_; }
  const ChannelFlags& flags() const { return flags_; }
  bool is_diagonal() const { return diagonal_; }
  bool is_closed_form() const { return closed_form_; }
  double closed_form_lambda() const { return cf_lambda_; }

  double entry(std::size_t i, std::size_t j) const;
  double diag(std::size_t i) const { return closed_form_ ? (i == 0 ? 1.0 : 1.0 - cf_lambda_) : ptm_[i * dim_ + i]; }
  double column_l1(std::size_t j) const { return col_[j].l1; }
  double row_l1(std::size_t i) const { return row_[i].l1; }
  // Number of non-zero entries in column j / row i.
  std::size_t column_support(std::size_t j) const { return col_[j].tau.size(); }
  std::size_t row_support(std::size_t i) const { return row_[i].tau.size(); }

  // u must be uniform on [0, 1).
  AdjointSample adjoint_sample(uint32_t s_local, double u) const { return draw(col_[s_local], u); }
  AdjointSample forward_sample(uint32_t s_local, double u) const { return draw(row_[s_local], u); }

  std::vector<std::pair<uint32_t, double>> adjoint_branches(uint32_t s_local) const;
  std::vector<std::pair<uint32_t, double>> forward_branches(uint32_t s_local) const;

 private:
  struct Alias {
    std::vector<uint32_t> tau;
    std::vector<double> sign;
    std::vector<double> prob;
    std::vector<uint32_t> alias;
    double l1 = 0.0;
  };
  static Alias build_alias(const std::vector<std::pair<uint32_t, double>>& entries);
  static AdjointSample draw(const Alias& a, double u);

  std::vector<std::size_t> support_;
  std::size_t dim_ = 1;
  std::vector<double> ptm_;
  std::vector<Alias> col_, row_;
  std::string label_;
  ChannelSpec spec_;
  ChannelFlags flags_;
  bool diagonal_ = true;
  bool closed_form_ = false;
  double cf_lambda_ = 0.0;
};

ChannelFlags validate(const PtmChannel& channel);

PtmChannel make_depolarizing(double lambda, std::vector<std::size_t> support = {0});
PtmChannel make_amplitude_damping(double gamma, std::vector<std::size_t> support = {0});
PtmChannel make_thermal(double gamma, double lambda, std::vector<std::size_t> support = {0});
// (gamma, lambda) from relaxation times: gamma = 1 - e^{-t/T1},
// lambda = e^{-t/T1} - e^{-t/(2 T2)}.
std::pair<double, double> thermal_from_times(double t1, double t2, double t);
// probs keyed by Pauli words over the support, e.g. {"I": 0.9, "X": 0.1}.
PtmChannel make_pauli_channel(const std::map<std::string, double>& probs,
                              std::vector<std::size_t> support = {0});
// Measure support[0] in Z, apply feedback (a Pauli on support[1..]) on
// outcome 1, leave the measured qubit maximally mixed.
PtmChannel make_mmff(const PauliString& feedback, std::vector<std::size_t> support);
PtmChannel make_raw_ptm(std::vector<double> ptm, std::vector<std::size_t> support);

// Dispatch on spec.kind. Range errors throw ValidationError.
PtmChannel build_channel(const ChannelSpec& spec);
// Same channel kind with one named parameter replaced.
PtmChannel with_param(const PtmChannel& ch, const std::string& name, double value);
// Name of the parameter a sensitivity analysis should vary, or "".
std::string default_noise_param(const std::string& kind);

// Local index helpers over a support.
std::size_t local_index_of(const PauliString& p, const std::vector<std::size_t>& support);
std::string local_label(std::size_t idx, std::size_t m);
std::size_t parse_local_label(std::string_view text);

}  // namespace obppp
