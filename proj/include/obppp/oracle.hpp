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
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "obppp/circuit.hpp"

namespace obppp {

// Dense 2^n x 2^n density matrix, row-major, basis bit q = qubit q.
class DenseState {
 public:
  DenseState() = default;
  explicit DenseState(std::size_t n);
  static DenseState from_sparse(const SparseState& s);

  std::size_t n() const { return n_; }
  std::size_t dim() const { return dim_; }
  std::complex<double>& at(std::size_t r, std::size_t c) { return a_[r * dim_ + c]; }
  std::complex<double> at(std::size_t r, std::size_t c) const { return a_[r * dim_ + c]; }
  std::vector<std::complex<double>>& data() { return a_; }
  const std::vector<std::complex<double>>& data() const { return a_; }

  std::complex<double> trace() const;
  double hermiticity_error() const;
  double purity() const;  // tr(rho^2)
  // tr(P rho) for an unnormalized Pauli word.
  double pauli_expectation(const PauliString& p) const;
  // tr(P rho) for every word, index sum_q code_q 4^q.
  std::vector<double> all_pauli_expectations() const;

  void apply_rotation(const SparseAxis& axis, double theta);
  void apply_unitary(const std::vector<std::size_t>& qubits, const std::vector<std::complex<double>>& u);
  void apply_clifford(CliffordKind kind, const std::vector<std::size_t>& qubits);
  void apply_channel(const PtmChannel& ch);

 private:
  std::size_t n_ = 0, dim_ = 0;
  std::vector<std::complex<double>> a_;
};

struct OracleOptions {
  std::size_t max_qubits = 10;
  bool noisy = true;
};

// Angles in radians, one per parameter.
DenseState dense_evolve(const Circuit& c, const std::vector<double>& angles, const SparseState& rho,
                        const OracleOptions& opt = {});
DenseState dense_evolve(const Circuit& c, const Theta& theta, const SparseState& rho,
                        const OracleOptions& opt = {});
// Includes the observable offset (identity component).
double dense_expectation(const Circuit& c, const std::vector<double>& angles,
                         const ObservableSum& obs, const SparseState& rho,
                         const OracleOptions& opt = {});
double dense_expectation(const Circuit& c, const Theta& theta, const ObservableSum& obs,
                         const SparseState& rho, const OracleOptions& opt = {});
std::vector<double> to_angles(const Theta& theta);

// Exact diagnostics by full enumeration of the 4^{N_g} angle grid.
struct GridResult {
  double mse = 0.0;
  double variance = 0.0;              // Var_theta <O~>
  std::vector<double> gradvar;        // per parameter, E_theta g_k^2
  std::vector<double> grad_mean;      // per parameter, E_theta g_k
  double gradvar_sum = 0.0;
  double moment2 = 0.0;               // HS expressibility
  double moment2_lb = 0.0;            // lower bound with uniform Pauli sigma
};

struct GridOptions {
  std::size_t max_points = 1u << 22;  // 4^{N_g} limit
  bool want_moments = false;          // needs n <= 5
  bool noisy = true;
};

GridResult grid_enumerate(const Problem& p, const GridOptions& opt = {});
// Convenience wrapper: functional is "mse", "variance", "gradvar" (param k),
// "gradvar_sum", "moment2" or "moment2_lb".
double grid_enumerate(const Problem& p, const std::string& functional, std::size_t k = 0);

// Matrix (I + SWAP) / (d (d + 1)) on two copies of n qubits, row-major.
std::vector<std::complex<double>> haar_2moment(std::size_t n);

// Max-entry deviation of the grid average of the two-fold rotation channel
// from its continuous-angle average (computed from the exact trigonometric
// moments). grid_angles defaults to {0, pi/2, pi, 3pi/2}.
double rotation_2design_check(const PauliString& axis, const std::vector<double>& grid_angles = {});

}  // namespace obppp
