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
#include <cmath>
#include <limits>

#include "detail.hpp"
#include "obppp/errors.hpp"

namespace obppp {

using nlohmann::json;

void DiagnosticConfig::validate() const {
  if (n_theta < 1) throw ValidationError("n_theta must be at least 1");
  if (n_tau < 1) throw ValidationError("n_tau must be at least 1");
  if (n_sigma < 1) throw ValidationError("n_sigma must be at least 1");
  if (chunk < 1) throw ValidationError("chunk must be at least 1");
  if (epsilon && !(*epsilon > 0.0 && *epsilon < 1.0)) throw ValidationError("epsilon must lie in (0, 1)");
  if (delta && !(*delta > 0.0 && *delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
}

json DiagnosticConfig::to_json() const {
  // threads is left out on purpose: it must not change any payload.
  json j = {{"n_theta", n_theta}, {"n_tau", n_tau},   {"n_sigma", n_sigma},
            {"seed", seed},       {"chunk", chunk},   {"mode", mode == EvalMode::Exact ? "exact" : "sampled"}};
  if (mode == EvalMode::Exact) {
    j["max_grid_points"] = max_grid_points;
    j["branch_cap"] = branch_cap;
  }
  if (epsilon) j["epsilon"] = *epsilon;
  if (delta) j["delta"] = *delta;
  return j;
}

json EstimateReport::to_json(bool with_timing) const {
  json j = {{"quantity", quantity}, {"mean", mean},       {"stderr", stderr_},
            {"n_theta", n_theta},   {"n_tau", n_tau},     {"n_sigma", n_sigma},
            {"seed", seed},         {"exact", exact},     {"negative", negative},
            {"config", config}};
  if (with_timing) j["wall_time_s"] = wall_time_s;
  for (const auto& [k, v] : extra) j[k] = v;
  return j;
}

L1Bound l1_expressibility_bound(double variance, const ObservableSum& obs) {
  const double l1 = obs.pauli_l1();
  if (!(l1 > 0.0)) throw ValidationError("observable has no traceless part");
  // tr(O^2) / (2^n (2^n + 1)) with tr(O^2) = 2^n sum c^2.
  const double haar = obs.coeff_sq_sum() / (std::ldexp(1.0, static_cast<int>(obs.n())) + 1.0);
  L1Bound b;
  b.value = (variance - haar) / (l1 * l1);
  b.informative = b.value > 0.0;
  return b;
}

SamplePlan plan_samples(double epsilon, double delta, double pauli_l1) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ValidationError("epsilon must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
  if (!(pauli_l1 > 0.0) || !std::isfinite(pauli_l1)) throw ValidationError("Pauli l1 norm must be positive");
  const double log_term = std::log(2.0 / delta);
  const double l2 = pauli_l1 * pauli_l1;
  // Inner samples are bounded by l1, outer samples h by 8 l1^2.
  const double tau = std::ceil(2.0 * l2 * log_term / (epsilon * epsilon));
  const double theta = std::ceil(32.0 * l2 * l2 * log_term / (epsilon * epsilon));
  const double cap = static_cast<double>(std::numeric_limits<std::size_t>::max() / 2);
  if (tau > cap || theta > cap) throw ValidationError("sample plan overflows");
  SamplePlan p;
  p.n_tau = std::max<std::size_t>(1, static_cast<std::size_t>(tau));
  p.n_theta = std::max<std::size_t>(1, static_cast<std::size_t>(theta));
  return p;
}

namespace detail {

OuterAngles::OuterAngles(const Circuit& c, const DiagnosticConfig& cfg)
    : n_params_(c.n_params()), seed_(cfg.seed), exhaustive_(cfg.mode == EvalMode::Exact) {
  if (exhaustive_) {
    if (2 * n_params_ >= 63 || (std::size_t{1} << (2 * n_params_)) > cfg.max_grid_points) {
      throw CapExceeded("exact mode needs 4^" + std::to_string(n_params_) +
                        " grid points, above max_grid_points = " + std::to_string(cfg.max_grid_points));
    }
    count_ = std::size_t{1} << (2 * n_params_);
  } else {
    count_ = cfg.n_theta;
  }
}

Theta OuterAngles::at(std::size_t i) const {
  if (exhaustive_) {
    Theta t(n_params_);
    for (std::size_t j = 0; j < n_params_; ++j) t[j] = static_cast<uint8_t>((i >> (2 * j)) & 3);
    return t;
  }
  RngStream rng(seed_, stream_key({kTagTheta, i}));
  return sample_theta(rng, n_params_);
}

bool single_replicate(const Engine& e, const DiagnosticConfig& cfg) {
  return e.deterministic() || cfg.mode == EvalMode::Exact;
}

double noisy_value(const Engine& e, const ObservableSum& obs, const Theta& theta,
                   const DiagnosticConfig& cfg, uint64_t key) {
  if (e.deterministic()) return expectation_mean(e, obs, theta, 1, cfg.seed, key);
  if (cfg.mode == EvalMode::Exact) return enumerate_expectation_exact(e, obs, theta, cfg.branch_cap);
  return expectation_mean(e, obs, theta, cfg.n_tau, cfg.seed, key);
}

EstimateReport base_report(const std::string& quantity, const DiagnosticConfig& cfg,
                           std::size_t n_theta, std::size_t n_tau, std::size_t n_sigma, bool exact) {
  EstimateReport r;
  r.quantity = quantity;
  r.n_theta = n_theta;
  r.n_tau = n_tau;
  r.n_sigma = n_sigma;
  r.seed = cfg.seed;
  r.exact = exact;
  r.config = cfg.to_json();
  return r;
}

double SparseMoments::stderr_mean(std::size_t j, std::size_t n) const {
  if (n < 2) return 0.0;
  const double nn = static_cast<double>(n);
  const double m = sum[j].value() / nn;
  const double var = std::max(0.0, (sum2[j].value() - nn * m * m) / (nn - 1.0));
  return std::sqrt(var / nn);
}

}  // namespace detail
}  // namespace obppp
