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

#include "detail.hpp"
#include "obppp/errors.hpp"

namespace obppp {

using namespace detail;

EstimateReport estimate_mse(const Problem& p, const DiagnosticConfig& cfg) {
  cfg.validate();
  Stopwatch clock;
  const Engine e(p.circuit, p.state);
  const OuterAngles outer(p.circuit, cfg);
  const bool single = single_replicate(e, cfg);
  const ObservableSum& obs = p.observable;

  const MomentAcc acc = run_outer(outer.count(), cfg, MomentAcc{}, [&](std::size_t i, MomentAcc& a) {
    const Theta th = outer.at(i);
    const double ideal = noiseless_expectation(e, obs, th);
    const double da = ideal - noisy_value(e, obs, th, cfg, stream_key({kTagMse, i, 0}));
    if (single) {
      a.add(da * da);
    } else {
      a.add(da * (ideal - noisy_value(e, obs, th, cfg, stream_key({kTagMse, i, 1}))));
    }
  });

  EstimateReport r = base_report("mse", cfg, outer.count(), reported_tau(e, cfg), 0, outer.exhaustive());
  r.mean = acc.mean();
  r.stderr_ = outer.exhaustive() ? 0.0 : acc.stderr_mean();
  r.negative = r.mean < 0.0;
  r.wall_time_s = clock.seconds();
  return r;
}

EstimateReport estimate_variance(const Problem& p, const DiagnosticConfig& cfg) {
  cfg.validate();
  Stopwatch clock;
  const Engine e(p.circuit, p.state);
  const OuterAngles outer(p.circuit, cfg);
  if (!outer.exhaustive() && outer.count() < 2) throw ValidationError("variance needs n_theta >= 2");
  const bool single = single_replicate(e, cfg);
  const ObservableSum& obs = p.observable;

  // Per angle: q = y_A y_B estimates <O~>^2 and m = (y_A + y_B) / 2
  // estimates <O~>.
  const CovAcc acc = run_outer(outer.count(), cfg, CovAcc{}, [&](std::size_t i, CovAcc& a) {
    const Theta th = outer.at(i);
    const double ya = noisy_value(e, obs, th, cfg, stream_key({kTagVariance, i, 0}));
    const double yb = single ? ya : noisy_value(e, obs, th, cfg, stream_key({kTagVariance, i, 1}));
    a.add(ya * yb, 0.5 * (ya + yb));
  });

  EstimateReport r = base_report("variance", cfg, outer.count(), reported_tau(e, cfg), 0, outer.exhaustive());
  const std::size_t n = acc.a.n;
  const double m = acc.b.mean();
  if (outer.exhaustive()) {
    r.mean = acc.a.mean() - m * m;
  } else {
    // Distinct-pair product removes the 1/n bias of mean(m)^2.
    r.mean = acc.a.mean() - pair_product_mean(acc.b.sum.value(), acc.b.sum2.value(), n);
    // Delta method on q - m^2: influence q_i - 2 mbar m_i.
    const double var = acc.a.variance() + 4.0 * m * m * acc.b.variance() - 4.0 * m * acc.covariance();
    r.stderr_ = std::sqrt(std::max(0.0, var) / static_cast<double>(n));
  }
  r.extra["mean_expectation"] = m + p.observable.offset();
  r.extra["mean_expectation_stderr"] = outer.exhaustive() ? 0.0 : acc.b.stderr_mean();
  r.negative = r.mean < 0.0;
  r.wall_time_s = clock.seconds();
  return r;
}

}  // namespace obppp
