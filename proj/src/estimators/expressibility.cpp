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

namespace {


// Mean of `reps` independent walks of sigma back through C~(theta).
double trace_estimate(const Engine& e, const Theta& th, const PauliString& sigma, std::size_t reps,
                      RngStream& rng, PathState& s) {
  double sum = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    s.load(sigma, 1.0);
    sum += e.walk_back(th, s, &rng);
  }
  return sum / static_cast<double>(reps);
}

// Words are drawn uniformly from the non-identity ones; the identity has
// t_I = 1 for trace-preserving channels and enters as an exact stratum.
PauliString sample_non_identity(RngStream& rng, std::size_t n, bool z_only) {
  for (;;) {
    PauliString p = sample_pauli(rng, n, z_only);
    if (!p.is_identity()) return p;
  }
}

bool is_z_type(const PauliString& p) {
  for (std::size_t w = 0; w < p.num_words(); ++w) {
    if (p.x()[w] != 0) return false;
  }
  return true;
}

void require_sampled(const DiagnosticConfig& cfg, const char* what) {
  if (cfg.mode == EvalMode::Exact) {
    throw ValidationError(std::string(what) + " has no exact estimator mode; the dense oracle "
                          "computes it exactly for small n");
  }
}

}  // namespace

EstimateReport estimate_expressibility_hs(const Problem& p, const DiagnosticConfig& cfg) {
  cfg.validate();
  require_sampled(cfg, "expressibility");
  Stopwatch clock;
  const Circuit& c = p.circuit;
  if (!c.all_channels_prs1()) {
    for (std::size_t s = 0; s < c.noise_sites().size(); ++s) {
      if (!c.noise_sites()[s].channel.flags().prs1) {
        throw ValidationError("noise site " + std::to_string(s) + " (" + c.noise_sites()[s].channel.label() +
                              ") is not PRS1, so the HS expressibility cannot be estimated; "
                              "use the lower bound instead (diagnose expressibility-lb)");
      }
    }
  }
  if (cfg.n_sigma < 2) throw ValidationError("expressibility needs n_sigma >= 2");
  const Engine e(c, p.state);
  const std::size_t n = c.n();
  const double dim = std::ldexp(1.0, static_cast<int>(n));
  const double haar = 2.0 / (dim + 1.0);
  const bool zero_state = p.state.is_zero_state();
  const std::size_t reps = e.deterministic() ? 1 : cfg.n_tau;
  const std::size_t m = cfg.n_sigma;

  // Per angle pair (theta1, theta2):
  //   X = tr(C~(theta1)(rho) C~(theta2)(sigma)) with sigma uniform on {I,Z}^n,
  //       whose mean over sigma is tr(rho1 rho2) for rho = |0><0|;
  //   Y = t_sigma(theta1)^2 replicate product with sigma uniform on all words.
  // The sample is pairs(E X) - 2/(D+1) mean(Y). The identity word is an
  // exact stratum in both: PRS1 channels are unital, so X_I = t_I = 1.
  const double p_id_all = std::pow(0.25, static_cast<double>(n));
  const double p_id_x = zero_state ? std::pow(0.5, static_cast<double>(n)) : p_id_all;
  const double x_id = zero_state ? 1.0 : dim;
  const MomentAcc acc = run_outer(cfg.n_theta, cfg, MomentAcc{}, [&](std::size_t i, MomentAcc& a) {
    thread_local PathState s;
    RngStream trng(cfg.seed, stream_key({kTagTheta, i}));
    RngStream trng2(cfg.seed, stream_key({kTagTheta2, i}));
    const Theta th1 = sample_theta(trng, c.n_params());
    const Theta th2 = sample_theta(trng2, c.n_params());
    RngStream rng(cfg.seed, stream_key({kTagHs, i}));
    double sx = 0.0, sx2 = 0.0, sy = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      double x = 0.0;
      if (zero_state) {
        const PauliString sigma = sample_non_identity(rng, n, true);
        for (std::size_t r = 0; r < reps; ++r) {
          s.load(sigma, 1.0);
          e.walk_forward(th2, s, &rng);
          if (s.weight != 0.0) x += e.walk_back(th1, s, &rng);
        }
        x /= static_cast<double>(reps);
      } else {
        // tr(rho1 rho2) = D E_sigma t1 t2 over all words; valid for any
        // state but with a larger variance.
        const PauliString sigma = sample_non_identity(rng, n, false);
        const double t1 = trace_estimate(e, th1, sigma, reps, rng, s);
        const double t2 = trace_estimate(e, th2, sigma, reps, rng, s);
        x = dim * t1 * t2;
      }
      sx += x;
      sx2 += x * x;
      const PauliString tau = sample_non_identity(rng, n, false);
      const double ya = trace_estimate(e, th1, tau, reps, rng, s);
      const double yb = e.deterministic() ? ya : trace_estimate(e, th1, tau, reps, rng, s);
      sy += ya * yb;
    }
    // (a + b mu)^2 with mu estimated by the draws: a^2 + 2ab mean + b^2 pairs.
    const double a0 = p_id_x * x_id, b0 = 1.0 - p_id_x;
    const double t3 = a0 * a0 + 2.0 * a0 * b0 * sx / static_cast<double>(m) + b0 * b0 * pair_product_mean(sx, sx2, m);
    const double t2 = p_id_all + (1.0 - p_id_all) * sy / static_cast<double>(m);
    a.add(t3 - haar * t2);
  });

  EstimateReport r = base_report("expressibility", cfg, cfg.n_theta, reps, m, false);
  r.mean = acc.mean();
  r.stderr_ = acc.stderr_mean();
  r.negative = r.mean < 0.0;
  r.wall_time_s = clock.seconds();
  return r;
}

EstimateReport estimate_expressibility_lower_bound(const Problem& p, const DiagnosticConfig& cfg) {
  cfg.validate();
  require_sampled(cfg, "expressibility-lb");
  Stopwatch clock;
  if (cfg.n_theta < 2) throw ValidationError("expressibility-lb needs n_theta >= 2");
  if (cfg.n_sigma < 4) throw ValidationError("expressibility-lb needs n_sigma >= 4 (two draws per stratum)");
  const Circuit& c = p.circuit;
  const Engine e(c, p.state);
  const std::size_t n = c.n();
  const double haar = 2.0 / (std::ldexp(1.0, static_cast<int>(n)) + 1.0);
  const std::size_t reps = e.deterministic() ? 1 : cfg.n_tau;
  const std::size_t m = cfg.n_theta;

  // Per sigma: y_j = t_A t_B at angle j estimates E_theta t^2, and the
  // distinct-pair mean of y estimates its square. The identity word
  // contributes 1 - 2/(D+1) exactly and is taken out of the sampling. The
  // rest is split into Z-type words (no X part) and all others, with the
  // draws alternating between the two: noise that pushes the state toward
  // the computational basis concentrates the value on the 2^n - 1 Z-type
  // words, which uniform sampling almost never hits.
  const double dn = std::ldexp(1.0, static_cast<int>(n));
  const double w_id = 1.0 / (dn * dn);
  const double w_z = (dn - 1.0) / (dn * dn);
  const double w_o = 1.0 - w_id - w_z;
  struct Strata {
    MomentAcc z, o;
    void merge(const Strata& x) {
      z.merge(x.z);
      o.merge(x.o);
    }
  };
  const Strata acc = run_outer(cfg.n_sigma, cfg, Strata{}, [&](std::size_t i, Strata& a) {
    thread_local PathState s;
    RngStream rng(cfg.seed, stream_key({kTagLb, i}));
    const bool z_stratum = i % 2 == 0;
    PauliString sigma = sample_non_identity(rng, n, z_stratum);
    while (!z_stratum && is_z_type(sigma)) sigma = sample_non_identity(rng, n, false);
    double sy = 0.0, sy2 = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const Theta th = sample_theta(rng, c.n_params());
      const double ta = trace_estimate(e, th, sigma, reps, rng, s);
      const double tb = e.deterministic() ? ta : trace_estimate(e, th, sigma, reps, rng, s);
      const double y = ta * tb;
      sy += y;
      sy2 += y * y;
    }
    (z_stratum ? a.z : a.o).add(pair_product_mean(sy, sy2, m) - haar * sy / static_cast<double>(m));
  });

  EstimateReport r = base_report("expressibility_lb", cfg, m, reps, cfg.n_sigma, false);
  r.mean = w_id * (1.0 - haar) + w_z * acc.z.mean() + w_o * acc.o.mean();
  r.stderr_ = std::hypot(w_z * acc.z.stderr_mean(), w_o * acc.o.stderr_mean());
  r.wall_time_s = clock.seconds();
  return r;
}

}  // namespace obppp
