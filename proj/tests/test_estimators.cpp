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
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "obppp/engine.hpp"
#include "obppp/errors.hpp"
#include "obppp/estimators.hpp"
#include "obppp/generators.hpp"
#include "obppp/oracle.hpp"
#include "random_circuits.hpp"
#include "ref_circuit.hpp"

using namespace obppp;

namespace {

Problem rx_toy(double lambda) {
  Circuit c(1);
  c.add_named_rotation("rx", {0}, 0);
  c.add_noise(make_depolarizing(lambda), 1, 0, 0);
  return {c, ObservableSum::parse_sparse(1, "Z0"), SparseState::zero(1)};
}

Problem rz_toy() {
  Circuit c(1);
  c.add_named_rotation("rz", {0}, 0);
  return {c, ObservableSum::parse_sparse(1, "Z0"), SparseState::zero(1)};
}

DiagnosticConfig sampled(std::size_t n_theta, uint64_t seed, std::size_t n_tau = 16) {
  DiagnosticConfig c;
  c.n_theta = n_theta;
  c.n_tau = n_tau;
  c.seed = seed;
  return c;
}

DiagnosticConfig exact() {
  DiagnosticConfig c;
  c.mode = EvalMode::Exact;
  return c;
}

bool within(double got, double se, double want, double k = 4.0, double floor = 1e-12) {
  return std::fabs(got - want) <= k * se + floor;
}

// Brute-force central difference of the exact grid MSE in one site's parameter.
double oracle_fd(const Problem& p, std::size_t site, const std::string& name, double h) {
  const double v = p.circuit.noise_sites()[site].channel.spec().params.at(name);
  const double lo = std::max(0.0, v - h);
  Problem a = p, b = p;
  a.circuit = with_site_param(p.circuit, site, name, v + h);
  b.circuit = with_site_param(p.circuit, site, name, lo);
  return (grid_enumerate(a, "mse") - grid_enumerate(b, "mse")) / (v + h - lo);
}

testing_util::RandomSpec small_spec(bool ad) {
  testing_util::RandomSpec s;
  s.n = 3;
  s.n_params = 5;
  s.n_fixed_clifford = 2;
  s.amplitude_damping = ad;
  return s;
}

}  // namespace

TEST(PlanSamples, Examples) {
  const SamplePlan p = plan_samples(0.05, 0.01, 1.0);
  EXPECT_EQ(p.n_tau, 4239u);
  // Outer samples carry the extra 16 l1^2 factor of the 8 ||O||^2 bound.
  const double raw = 32.0 * std::log(2.0 / 0.01) / (0.05 * 0.05);
  EXPECT_EQ(p.n_theta, static_cast<std::size_t>(std::ceil(raw)));
  EXPECT_EQ(p.n_theta, 67819u);
  EXPECT_NEAR(static_cast<double>(p.n_theta), 16.0 * 4239.0, 16.0);

  const SamplePlan small = plan_samples(0.999, 0.5, 1.0);
  EXPECT_GE(small.n_tau, 1u);
  EXPECT_LE(small.n_tau, 3u);
  EXPECT_EQ(plan_samples(0.05, 0.01, 2.0).n_tau, static_cast<std::size_t>(std::ceil(8.0 * std::log(200.0) / 0.0025)));
}

TEST(PlanSamples, RangeErrors) {
  EXPECT_THROW(plan_samples(0.0, 0.1, 1), ValidationError);
  EXPECT_THROW(plan_samples(1.0, 0.1, 1), ValidationError);
  EXPECT_THROW(plan_samples(0.1, 0.0, 1), ValidationError);
  EXPECT_THROW(plan_samples(0.1, 1.5, 1), ValidationError);
  EXPECT_THROW(plan_samples(0.1, 0.1, 0), ValidationError);
}

TEST(L1Bound, Examples) {
  for (std::size_t n = 1; n <= 6; ++n) {
    const ObservableSum o = ObservableSum::parse_sparse(n, "Z0");
    const double haar = 1.0 / (std::ldexp(1.0, static_cast<int>(n)) + 1.0);
    const L1Bound at_haar = l1_expressibility_bound(haar, o);
    EXPECT_NEAR(at_haar.value, 0.0, 1e-16);
    EXPECT_LE(at_haar.value, 1e-16);
    // 2^-n sits just above the Haar variance, by 1 / (2^n (2^n + 1)).
    const L1Bound near = l1_expressibility_bound(std::ldexp(1.0, -static_cast<int>(n)), o);
    EXPECT_NEAR(near.value, haar * std::ldexp(1.0, -static_cast<int>(n)), 1e-16);
  }
  const L1Bound b = l1_expressibility_bound(0.5, ObservableSum::parse_sparse(1, "Z0"));
  EXPECT_NEAR(b.value, 1.0 / 6.0, 1e-15);
  EXPECT_TRUE(b.informative);
  const L1Bound zero = l1_expressibility_bound(0.0, ObservableSum::parse_sparse(1, "Z0"));
  EXPECT_LT(zero.value, 0.0);
  EXPECT_FALSE(zero.informative);
  // Pauli l1 in the denominator: O = 2 Z gives (Var - 4/3) / 4.
  EXPECT_NEAR(l1_expressibility_bound(2.0, ObservableSum::parse_sparse(1, "2*Z0")).value, (2.0 - 4.0 / 3.0) / 4.0, 1e-15);
}

TEST(L1Bound, BelowTrueTraceDistance) {
  // R_X(theta)|0>, O = Z: Var = 1/2 gives the bound 1/6. Compare with the
  // trace norm of (E rho (x) rho) minus the Haar moment.
  const Problem p = rx_toy(0.0);
  ref::Mat avg(4);
  for (int k = 0; k < 4; ++k) {
    const ref::Mat rho = ref::evolve(p.circuit, {k * M_PI / 2}, ref::zero_state(1), false);
    avg = avg + 0.25 * ref::kron_lsb(rho, rho);
  }
  ref::Mat haar(4);
  haar.a = haar_2moment(1);
  const double tn = ref::trace_norm_hermitian(avg - haar);
  const double var = grid_enumerate(p, "variance");
  EXPECT_NEAR(var, 0.5, 1e-15);
  const L1Bound b = l1_expressibility_bound(var, p.observable);
  EXPECT_GE(tn + 1e-12, b.value);
  EXPECT_GT(tn, 0.0);
}

TEST(Mse, Examples) {
  const EstimateReport z = estimate_mse(rx_toy(0.0), sampled(100, 1));
  EXPECT_EQ(z.mean, 0.0);
  EXPECT_EQ(z.stderr_, 0.0);

  const EstimateReport ex = estimate_mse(rx_toy(0.1), exact());
  EXPECT_NEAR(ex.mean, 0.005, 1e-15);
  EXPECT_TRUE(ex.exact);
  EXPECT_EQ(ex.n_theta, 4u);

  const EstimateReport s = estimate_mse(rx_toy(0.1), sampled(4000, 7));
  EXPECT_TRUE(within(s.mean, s.stderr_, 0.005)) << s.mean << " +- " << s.stderr_;
  EXPECT_EQ(s.quantity, "mse");
  EXPECT_FALSE(s.negative);
}

TEST(Mse, GridChipSamplesMatchDense) {
  NoiseTemplate t;
  t.channel = make_depolarizing(0.007, {0}).spec();
  const Problem p = gen_grid_chip(3, 3, 1, "rzz", t);
  const Engine e(p.circuit, p.state);
  ASSERT_TRUE(e.deterministic());
  RngStream rng(5, 9);
  for (int trial = 0; trial < 4; ++trial) {
    const Theta th = sample_theta(rng, p.circuit.n_params());
    const double d_path = noiseless_expectation(e, p.observable, th) - expectation_mean(e, p.observable, th, 1, 0, 0);
    OracleOptions noisy, clean;
    clean.noisy = false;
    const double d_dense = dense_expectation(p.circuit, th, p.observable, p.state, clean) -
                           dense_expectation(p.circuit, th, p.observable, p.state, noisy);
    EXPECT_NEAR(d_path, d_dense, 1e-10);
  }
  const EstimateReport r = estimate_mse(p, sampled(5000, 3));
  EXPECT_GT(r.mean, 0.0);
  EXPECT_LT(r.stderr_, 0.1 * r.mean);
}

TEST(Mse, ExactModeEqualsGridOracle) {
  std::mt19937_64 g(101);
  int sampled_ok = 0;
  const int trials = 8;
  for (int trial = 0; trial < trials; ++trial) {
    const Problem p = testing_util::random_problem(g, small_spec(true));
    const double want = grid_enumerate(p, "mse");
    EXPECT_NEAR(estimate_mse(p, exact()).mean, want, 1e-10) << "trial " << trial;
    const EstimateReport s = estimate_mse(p, sampled(3000, 11 + trial, 8));
    sampled_ok += within(s.mean, s.stderr_, want);
  }
  EXPECT_GE(sampled_ok, trials - 1);
}

TEST(Variance, MatchesGridOracle) {
  std::mt19937_64 g(202);
  for (int trial = 0; trial < 6; ++trial) {
    const Problem p = testing_util::random_problem(g, small_spec(trial % 2 == 0));
    const double want = grid_enumerate(p, "variance");
    EXPECT_NEAR(estimate_variance(p, exact()).mean, want, 1e-10);
    const EstimateReport s = estimate_variance(p, sampled(4000, 3 + trial, 8));
    EXPECT_TRUE(within(s.mean, s.stderr_, want)) << trial << ": " << s.mean << " +- " << s.stderr_ << " vs " << want;
  }
  EXPECT_THROW(estimate_variance(rx_toy(0.1), sampled(1, 1)), ValidationError);
}

TEST(GradVar, Examples) {
  EXPECT_NEAR(estimate_gradient_variance(rx_toy(0.0), 0, exact()).mean, 0.5, 1e-15);
  const EstimateReport s = estimate_gradient_variance(rx_toy(0.0), 0, sampled(2000, 4));
  EXPECT_TRUE(within(s.mean, s.stderr_, 0.5));
  EXPECT_EQ(s.quantity, "gradvar");
  // R_Z on |0> commutes with Z: the gradient vanishes at every angle.
  const EstimateReport z = estimate_gradient_variance(rz_toy(), 0, sampled(200, 4));
  EXPECT_EQ(z.mean, 0.0);
  EXPECT_EQ(z.extra.at("mean_gradient"), 0.0);
  EXPECT_THROW(estimate_gradient_variance(rx_toy(0.0), 1, sampled(10, 1)), DimensionError);
}

TEST(GradVar, MatchesGridOracle) {
  std::mt19937_64 g(303);
  for (int trial = 0; trial < 6; ++trial) {
    const Problem p = testing_util::random_problem(g, small_spec(trial % 2 == 1));
    GridOptions go;
    const GridResult want = grid_enumerate(p, go);
    const GradVarResult ex = estimate_gradient_variances(p, {}, exact());
    ASSERT_EQ(ex.params.size(), p.circuit.n_params());
    for (std::size_t k = 0; k < ex.params.size(); ++k) {
      EXPECT_NEAR(ex.params[k].gradvar, want.gradvar[k], 1e-10);
      EXPECT_NEAR(ex.params[k].mean_gradient, 0.0, 1e-12);
    }
    EXPECT_NEAR(ex.sum.mean, want.gradvar_sum, 1e-10);

    const GradVarResult s = estimate_gradient_variances(p, {}, sampled(2000, 50 + trial, 8));
    EXPECT_TRUE(within(s.sum.mean, s.sum.stderr_, want.gradvar_sum)) << trial;
    double parts = 0.0;
    for (std::size_t k = 0; k < s.params.size(); ++k) {
      parts += s.params[k].gradvar;
      EXPECT_TRUE(within(s.params[k].mean_gradient, s.params[k].mean_gradient_stderr, 0.0, 4.0, 1e-12))
          << "trial " << trial << " param " << k;
    }
    EXPECT_NEAR(parts, s.sum.mean, 1e-12);
  }
}

TEST(GradVar, ZeroObservableGivesZero) {
  Problem p = rx_toy(0.1);
  p.observable = ObservableSum(1);
  EXPECT_EQ(sum_gradient_variance(p, sampled(50, 1)).mean, 0.0);
}

TEST(GradVar, CsvShape) {
  const GradVarResult r = estimate_gradient_variances(gen_line_benchmark(3, 1), {}, sampled(20, 1));
  const std::string csv = r.to_csv();
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 5 + 1);
  EXPECT_EQ(csv.rfind("sum,", std::string::npos) != std::string::npos, true);
}

TEST(Sensitivity, ToyClosedForm) {
  const SensitivityMap ex = estimate_sensitivity_map(rx_toy(0.1), exact());
  ASSERT_EQ(ex.sites.size(), 1u);
  EXPECT_NEAR(ex.sites[0].gradient, 0.1, 1e-14);
  EXPECT_EQ(ex.sites[0].method, "path");
  const SensitivityMap s = estimate_sensitivity_map(rx_toy(0.1), sampled(4000, 8));
  EXPECT_TRUE(within(s.sites[0].gradient, s.sites[0].stderr_, 0.1));
  EXPECT_NEAR(s.sites[0].gradient, 0.1, 0.005);
  EXPECT_EQ(estimate_sensitivity_map(rx_toy(0.0), sampled(100, 8)).sites[0].gradient, 0.0);
}

TEST(Sensitivity, PathMatchesFiniteDifferenceOracle) {
  std::mt19937_64 g(404);
  for (int trial = 0; trial < 6; ++trial) {
    const Problem p = testing_util::random_problem(g, small_spec(false));
    const SensitivityMap m = estimate_sensitivity_map(p, exact());
    for (const auto& site : m.sites) {
      const double want = oracle_fd(p, site.site, "lambda", 1e-3);
      EXPECT_LE(std::fabs(site.gradient - want), std::max(0.05 * std::fabs(want), 1e-4))
          << "trial " << trial << " site " << site.site;
      EXPECT_NEAR(site.gradient, want, 1e-6);
    }
    EXPECT_NEAR(m.mse.mean, grid_enumerate(p, "mse"), 1e-12);
  }
}

TEST(Sensitivity, MixedChannelsSampled) {
  // Depolarizing sites use tracked paths, damping sites finite differences.
  std::mt19937_64 g(505);
  int checked = 0, ok = 0;
  for (int trial = 0; trial < 3; ++trial) {
    const Problem p = testing_util::random_problem(g, small_spec(true));
    DiagnosticConfig cfg = sampled(3000, 70 + trial, 16);
    const SensitivityMap m = estimate_sensitivity_map(p, cfg);
    for (const auto& site : m.sites) {
      const double want = oracle_fd(p, site.site, site.param, 1e-3);
      EXPECT_EQ(site.method, site.param == "lambda" ? "path" : "fd");
      ++checked;
      ok += std::fabs(site.gradient - want) <= std::max(4.0 * site.stderr_, 1e-4);
    }
  }
  ASSERT_GT(checked, 0);
  EXPECT_GE(ok, checked - 1) << ok << " of " << checked;
}

TEST(Sensitivity, ModesAndErrors) {
  std::mt19937_64 g(606);
  const Problem dep = testing_util::random_problem(g, small_spec(false));
  const SensitivityMap path = estimate_sensitivity_map(dep, exact());
  SensitivityOptions fd_opt;
  fd_opt.mode = SensitivityMode::FiniteDifference;
  const SensitivityMap fd = estimate_sensitivity_map(dep, exact(), fd_opt);
  for (std::size_t s = 0; s < path.sites.size(); ++s) {
    EXPECT_EQ(fd.sites[s].method, "fd");
    EXPECT_NEAR(fd.sites[s].gradient, path.sites[s].gradient, 1e-6);
  }
  SensitivityOptions strict;
  strict.mode = SensitivityMode::Path;
  const Problem ad = testing_util::random_problem(g, [] {
    auto s = small_spec(true);
    s.depolarizing = false;
    return s;
  }());
  ASSERT_FALSE(ad.circuit.noise_sites().empty());
  EXPECT_THROW(estimate_sensitivity_map(ad, sampled(10, 1), strict), ValidationError);
  Problem pauli = rx_toy(0.1);
  pauli.circuit.add_noise(make_pauli_channel({{"X", 0.1}, {"I", 0.9}}, {0}), 1, 0, 1);
  EXPECT_THROW(estimate_sensitivity_map(pauli, sampled(10, 1)), ValidationError);
}

TEST(Sensitivity, CsvHasOneRowPerSite) {
  NoiseTemplate t;
  t.channel = make_depolarizing(0.01, {0}).spec();
  const Problem p = gen_ring(4, 1, t);
  const SensitivityMap m = estimate_sensitivity_map(p, sampled(50, 1));
  EXPECT_EQ(m.sites.size(), p.circuit.noise_sites().size());
  const std::string csv = m.to_csv();
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), 1 + m.sites.size());
}

TEST(Bottleneck, BudgetZero) {
  const Problem p = rx_toy(0.1);
  const InterventionPlan plan = bottleneck_first_plan(p, sampled(500, 3), 0.001, 0);
  EXPECT_TRUE(plan.steps.empty());
  EXPECT_EQ(plan.initial_mse, estimate_mse(p, sampled(500, 3)).mean);
}

TEST(Bottleneck, PlantedDominantSite) {
  // Z0 only sees qubit 0. Qubit 1 has the stronger channel but sits
  // outside the light cone; qubit 0 carries a weak and a strong channel.
  Circuit c(2);
  c.add_named_rotation("rx", {0}, 0);
  c.add_named_rotation("rx", {1}, 0);
  c.add_noise(make_depolarizing(0.02), 2, 0, 0);
  c.add_noise(make_depolarizing(0.3, {1}), 2, 0, 1);
  c.add_named_rotation("ry", {0}, 1);
  c.add_noise(make_depolarizing(0.1), 3, 1, 2);
  const Problem p{c, ObservableSum::parse_sparse(2, "Z0"), SparseState::zero(2)};
  std::size_t oracle_best = 0;
  double best = -1.0;
  for (std::size_t s = 0; s < 3; ++s) {
    const double gr = std::fabs(oracle_fd(p, s, "lambda", 1e-3));
    if (gr > best) {
      best = gr;
      oracle_best = s;
    }
  }
  EXPECT_EQ(oracle_best, 2u);
  const InterventionPlan plan = bottleneck_first_plan(p, sampled(2000, 5), 0.001, 1);
  ASSERT_EQ(plan.steps.size(), 1u);
  EXPECT_EQ(plan.steps[0].site, oracle_best);
  EXPECT_LT(plan.steps[0].mse, plan.initial_mse);
  EXPECT_EQ(plan.hotspots.sites[1].gradient, 0.0);
}

TEST(Bottleneck, MonotoneTrajectory) {
  NoiseTemplate t;
  t.channel = make_depolarizing(0.01, {0}).spec();
  const Problem p = gen_grid_chip(3, 4, 1, "rzz", t);
  const std::size_t budget = 2;
  ASSERT_LE(budget, p.circuit.noise_sites().size() / 20);
  const InterventionPlan plan = bottleneck_first_plan(p, sampled(2000, 9), 0.001, budget);
  ASSERT_EQ(plan.steps.size(), budget);
  double prev = plan.initial_mse;
  for (const auto& s : plan.steps) {
    EXPECT_LE(s.mse, prev);
    EXPECT_DOUBLE_EQ(s.new_value, 0.001);
    prev = s.mse;
  }
  EXPECT_NE(plan.steps[0].site, plan.steps[1].site);
  const std::string csv = plan.trajectory_csv();
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 1 + static_cast<long>(budget));
}

TEST(Expressibility, SingleRzToy) {
  DiagnosticConfig cfg = sampled(400, 12);
  cfg.n_sigma = 16;
  const EstimateReport r = estimate_expressibility_hs(rz_toy(), cfg);
  EXPECT_TRUE(within(r.mean, r.stderr_, 2.0 / 3.0, 2.0)) << r.mean << " +- " << r.stderr_;
  EXPECT_EQ(r.quantity, "expressibility");
}

TEST(Expressibility, MatchesDenseOracle) {
  std::mt19937_64 g(707);
  for (int trial = 0; trial < 4; ++trial) {
    auto spec = small_spec(false);
    spec.n = 2;
    spec.n_params = 4;
    spec.noise_prob = trial % 2 ? 0.5 : 0.0;
    const Problem p = testing_util::random_problem(g, spec);
    GridOptions go;
    go.want_moments = true;
    const GridResult want = grid_enumerate(p, go);
    DiagnosticConfig cfg = sampled(2000, 20 + trial);
    cfg.n_sigma = 8;
    const EstimateReport hs = estimate_expressibility_hs(p, cfg);
    EXPECT_TRUE(within(hs.mean, hs.stderr_, want.moment2)) << trial << ": " << hs.mean << " +- " << hs.stderr_ << " vs " << want.moment2;
    const EstimateReport lb = estimate_expressibility_lower_bound(p, cfg);
    EXPECT_TRUE(within(lb.mean, lb.stderr_, want.moment2_lb)) << trial << ": " << lb.mean << " vs " << want.moment2_lb;
    EXPECT_LE(lb.mean, hs.mean + 4.0 * std::hypot(lb.stderr_, hs.stderr_));
  }
}

TEST(Expressibility, LowerBoundOnDampedCircuits) {
  std::mt19937_64 g(808);
  for (int trial = 0; trial < 3; ++trial) {
    auto spec = small_spec(true);
    spec.n = 2;
    spec.n_params = 4;
    spec.depolarizing = false;
    const Problem p = testing_util::random_problem(g, spec);
    ASSERT_FALSE(p.circuit.all_channels_prs1());
    GridOptions go;
    go.want_moments = true;
    const GridResult want = grid_enumerate(p, go);
    DiagnosticConfig cfg = sampled(64, 30 + trial, 16);
    cfg.n_sigma = 1500;
    const EstimateReport lb = estimate_expressibility_lower_bound(p, cfg);
    EXPECT_TRUE(within(lb.mean, lb.stderr_, want.moment2_lb)) << lb.mean << " +- " << lb.stderr_ << " vs " << want.moment2_lb;
    EXPECT_LE(lb.mean, want.moment2 + 4.0 * lb.stderr_);
    try {
      estimate_expressibility_hs(p, cfg);
      ADD_FAILURE() << "expected a PRS1 error";
    } catch (const ValidationError& e) {
      EXPECT_NE(std::string(e.what()).find("expressibility-lb"), std::string::npos);
    }
  }
}

TEST(Expressibility, ZeroDampingEqualsNoiseless) {
  const Problem clean = gen_ring(4, 1, {});
  NoiseTemplate t;
  t.channel = make_amplitude_damping(0.0, {0}).spec();
  const Problem damped = gen_ring(4, 1, t);
  DiagnosticConfig cfg = sampled(16, 3);
  cfg.n_sigma = 64;
  EXPECT_NEAR(estimate_expressibility_lower_bound(damped, cfg).mean,
              estimate_expressibility_lower_bound(clean, cfg).mean, 1e-14);
}

TEST(Determinism, ThreadCountDoesNotChangePayloads) {
  std::mt19937_64 g(909);
  const Problem p = testing_util::random_problem(g, small_spec(true));
  auto payloads = [&](std::size_t threads) {
    DiagnosticConfig cfg = sampled(300, 17, 4);
    cfg.threads = threads;
    cfg.chunk = 16;
    nlohmann::json j;
    j["mse"] = estimate_mse(p, cfg).to_json(false);
    j["var"] = estimate_variance(p, cfg).to_json(false);
    j["grad"] = estimate_gradient_variances(p, {}, cfg).to_json(false);
    j["sens"] = estimate_sensitivity_map(p, cfg).to_json(false);
    cfg.n_sigma = 8;
    j["lb"] = estimate_expressibility_lower_bound(p, cfg).to_json(false);
    return j.dump();
  };
  const std::string one = payloads(1);
  EXPECT_EQ(one, payloads(4));
  EXPECT_EQ(one, payloads(8));
  EXPECT_EQ(one, payloads(0));
}

TEST(Honesty, StderrCoverage) {
  // A damped circuit so that both inner and outer sampling contribute.
  Circuit c(2);
  c.add_named_rotation("rx", {0}, 0);
  c.add_named_rotation("ry", {1}, 0);
  c.add_noise(make_amplitude_damping(0.2), 2, 0, 0);
  c.add_named_rotation("rzz", {0, 1}, 1);
  c.add_noise(make_depolarizing(0.1, {1}), 3, 1, 1);
  c.add_named_rotation("rx", {1}, 2);
  const Problem p{c, ObservableSum::parse_sparse(2, "Z0 + 0.5*X1 Z0"), SparseState::zero(2)};
  GridOptions go;
  go.want_moments = true;
  const GridResult want = grid_enumerate(p, go);
  const double sens_want = oracle_fd(p, 1, "lambda", 1e-4);

  int mse = 0, var = 0, grad = 0, sens = 0, lb = 0;
  const int runs = 100;
  for (int r = 0; r < runs; ++r) {
    DiagnosticConfig cfg = sampled(200, 1000 + r, 4);
    const EstimateReport m = estimate_mse(p, cfg);
    mse += within(m.mean, m.stderr_, want.mse, 2.0);
    const EstimateReport v = estimate_variance(p, cfg);
    var += within(v.mean, v.stderr_, want.variance, 2.0);
    const EstimateReport gv = sum_gradient_variance(p, cfg);
    grad += within(gv.mean, gv.stderr_, want.gradvar_sum, 2.0);
    const SensitivityMap sm = estimate_sensitivity_map(p, cfg);
    sens += within(sm.sites[1].gradient, sm.sites[1].stderr_, sens_want, 2.0, 1e-6);
    DiagnosticConfig lcfg = sampled(16, 1000 + r, 4);
    lcfg.n_sigma = 200;
    const EstimateReport l = estimate_expressibility_lower_bound(p, lcfg);
    lb += within(l.mean, l.stderr_, want.moment2_lb, 2.0);
  }
  EXPECT_GE(mse, 90);
  EXPECT_GE(var, 90);
  EXPECT_GE(grad, 90);
  EXPECT_GE(sens, 90);
  EXPECT_GE(lb, 90);
}

TEST(Honesty, HsCoverage) {
  Circuit c(2);
  c.add_named_rotation("rx", {0}, 0);
  c.add_named_rotation("ry", {1}, 0);
  c.add_noise(make_depolarizing(0.2), 2, 0, 0);
  c.add_named_rotation("rzz", {0, 1}, 1);
  const Problem p{c, ObservableSum::parse_sparse(2, "Z0"), SparseState::zero(2)};
  GridOptions go;
  go.want_moments = true;
  const double want = grid_enumerate(p, go).moment2;
  int ok = 0;
  for (int r = 0; r < 100; ++r) {
    DiagnosticConfig cfg = sampled(200, 5000 + r, 4);
    cfg.n_sigma = 4;
    const EstimateReport h = estimate_expressibility_hs(p, cfg);
    ok += within(h.mean, h.stderr_, want, 2.0);
  }
  EXPECT_GE(ok, 90);
}
