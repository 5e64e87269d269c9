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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "obppp/circuit.hpp"

namespace obppp {

// Sampled: i.i.d. uniform grid angles and sampled channel branches.
// Exact: every grid point in order with exact branch sums; stderr is 0.
enum class EvalMode { Sampled, Exact };

struct DiagnosticConfig {
  std::size_t n_theta = 1000;  // outer angle samples
  std::size_t n_tau = 16;      // inner branch samples per replicate
  std::size_t n_sigma = 64;    // Pauli samples (expressibility only)
  uint64_t seed = 1;
  std::size_t threads = 1;  // 0 picks default_thread_count()
  // Outer samples per work unit. Part of the output contract: changing it
  // reorders floating point sums, changing the thread count does not.
  std::size_t chunk = 64;
  EvalMode mode = EvalMode::Sampled;
  std::size_t max_grid_points = std::size_t{1} << 20;  // exact mode
  std::size_t branch_cap = std::size_t{1} << 20;       // exact mode, per term
  std::optional<double> epsilon, delta;                // recorded, used by the planner

  void validate() const;
  nlohmann::json to_json() const;
};

struct EstimateReport {
  std::string quantity;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n_theta = 0, n_tau = 0, n_sigma = 0;
  uint64_t seed = 0;
  double wall_time_s = 0.0;
  bool exact = false;
  // Set when a provably non-negative quantity came out negative. The value
  // is kept raw so that averages over runs stay unbiased.
  bool negative = false;
  std::map<std::string, double> extra;
  nlohmann::json config;

  // Timing is the only field that differs between identical runs.
  nlohmann::json to_json(bool with_timing = true) const;
};

// E_theta (<O>_theta - <O~>_theta)^2.
EstimateReport estimate_mse(const Problem& p, const DiagnosticConfig& cfg);

// Var_theta <O~>_theta. Delta-method stderr.
EstimateReport estimate_variance(const Problem& p, const DiagnosticConfig& cfg);

struct ParamGradVar {
  std::size_t param = 0;
  double gradvar = 0.0, stderr_ = 0.0;
  double mean_gradient = 0.0, mean_gradient_stderr = 0.0;
};

struct GradVarResult {
  EstimateReport sum;  // sum over the requested parameters
  std::vector<ParamGradVar> params;
  nlohmann::json to_json(bool with_timing = true) const;
  std::string to_csv() const;  // param,gradvar,stderr,mean_gradient,mean_gradient_stderr + sum row
};

// Parameter-shift gradients with shared angle samples across parameters.
// An empty list means every parameter.
GradVarResult estimate_gradient_variances(const Problem& p, std::vector<std::size_t> params,
                                          const DiagnosticConfig& cfg);
EstimateReport estimate_gradient_variance(const Problem& p, std::size_t k, const DiagnosticConfig& cfg);
EstimateReport sum_gradient_variance(const Problem& p, const DiagnosticConfig& cfg);

// Path: depolarizing sites only, error elsewhere. FiniteDifference: central
// differences of the MSE estimate with common random numbers. Auto: path
// for depolarizing sites, finite differences for the rest.
enum class SensitivityMode { Auto, Path, FiniteDifference };

struct SensitivityOptions {
  SensitivityMode mode = SensitivityMode::Auto;
  double fd_step = 1e-3;
};

struct SiteSensitivity {
  std::size_t site = 0;
  int layer = 0, element = 0;
  std::vector<std::size_t> qubits;
  std::string param;
  double value = 0.0;
  double gradient = 0.0, stderr_ = 0.0;
  std::string method;  // "path" or "fd"
};

struct SensitivityMap {
  std::vector<SiteSensitivity> sites;  // same order as the circuit's noise sites
  EstimateReport mse;                  // by-product of the same samples
  nlohmann::json to_json(bool with_timing = true) const;
  std::string to_csv() const;  // site,layer,element,qubits,param,value,gradient,stderr,method
};

SensitivityMap estimate_sensitivity_map(const Problem& p, const DiagnosticConfig& cfg,
                                        const SensitivityOptions& opt = {});

struct InterventionStep {
  std::size_t site = 0;
  double old_value = 0.0, new_value = 0.0;
  double gradient = 0.0, gradient_stderr = 0.0;
  double mse = 0.0, mse_stderr = 0.0;  // measured after the change
};

struct InterventionPlan {
  double initial_mse = 0.0, initial_mse_stderr = 0.0;
  std::vector<InterventionStep> steps;
  SensitivityMap hotspots;  // map of the unmodified circuit
  Problem final_problem;
  nlohmann::json to_json(bool with_timing = true) const;
  std::string trajectory_csv() const;  // step,site,layer,element,old,new,gradient,mse,mse_stderr
};

// Greedy loop: estimate the map, lower the most sensitive site still above
// lambda_target to lambda_target, re-measure the MSE, repeat budget times.
// Every estimate reuses cfg.seed, so the trajectory has common random numbers.
InterventionPlan bottleneck_first_plan(const Problem& p, const DiagnosticConfig& cfg,
                                       double lambda_target, std::size_t budget,
                                       const SensitivityOptions& opt = {});

// HS distance of the output second moment from the Haar moment. Needs every
// channel to be PRS1 (the forward walk uses PTM rows).
EstimateReport estimate_expressibility_hs(const Problem& p, const DiagnosticConfig& cfg);

// Lower bound with sigma sampled uniformly from all Pauli words. Each sigma
// gets n_theta angle draws; the outer average runs over n_sigma.
EstimateReport estimate_expressibility_lower_bound(const Problem& p, const DiagnosticConfig& cfg);

struct L1Bound {
  double value = 0.0;
  bool informative = false;  // value > 0
};

// Lower bound on the expected trace distance from Haar given Var<O>.
// Uses the Pauli l1 norm in place of the operator norm, so it is valid but
// conservative.
L1Bound l1_expressibility_bound(double variance, const ObservableSum& obs);

struct SamplePlan {
  std::size_t n_theta = 0, n_tau = 0;
};

// Hoeffding counts for additive error epsilon with probability 1 - delta.
SamplePlan plan_samples(double epsilon, double delta, double pauli_l1);

}  // namespace obppp
