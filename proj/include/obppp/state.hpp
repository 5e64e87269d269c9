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

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "obppp/pauli.hpp"

namespace obppp {

// Computational basis label, bit q of word q / 64 is qubit q.
using BasisIndex = std::vector<uint64_t>;

BasisIndex parse_basis(std::string_view bits);  // "0101", char q is qubit q
std::string basis_str(const BasisIndex& b, std::size_t n);

// rho = sum_e amp_e |row_e><col_e|. Hermitian with unit trace.
class SparseState {
 public:
  struct Entry {
    BasisIndex row, col;
    std::complex<double> amp;
  };

  SparseState() = default;
  static SparseState zero(std::size_t n);
  // Validates Hermiticity and unit trace (1e-12) and merges duplicates.
  static SparseState from_entries(std::size_t n, std::vector<Entry> entries);

  std::size_t n() const { return n_; }
  bool is_zero_state() const { return zero_; }
  const std::vector<Entry>& entries() const { return entries_; }

  // tr(P rho) for the unnormalized Pauli word with phase i^q. Real for
  // Hermitian inputs; the imaginary residue is discarded.
  double trace_unnormalized(const uint64_t* x, const uint64_t* z, uint8_t q) const;

 private:
  std::size_t n_ = 0;
  bool zero_ = false;
  std::vector<Entry> entries_;
};

// Returns tr(p rho) with p in the normalized basis, i.e. 2^{-n/2} tr(P rho).
double trace_with_sparse_state(const SignedPauli& p, const SparseState& rho);

// O = offset * I + sum_h c_h P_h with every P_h non-identity.
class ObservableSum {
 public:
  struct Term {
    double coeff;
    PauliString pauli;
  };

  ObservableSum() = default;
  explicit ObservableSum(std::size_t n) : n_(n) {}
  // Merges duplicates and moves any identity component into offset().
  static ObservableSum from_terms(std::size_t n, std::vector<Term> terms);
  // Tokens like "0.5*X0 Z3 + Z1" or "-Y2".
  static ObservableSum parse_sparse(std::size_t n, std::string_view text);

  std::size_t n() const { return n_; }
  const std::vector<Term>& terms() const { return terms_; }
  double offset() const { return offset_; }
  double pauli_l1() const;
  // tr(O^2) / 2^n for the traceless part.
  double coeff_sq_sum() const;
  std::string str() const;

 private:
  std::size_t n_ = 0;
  double offset_ = 0.0;
  std::vector<Term> terms_;
};

}  // namespace obppp
