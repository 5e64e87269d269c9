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

#include "obppp/errors.hpp"
#include "obppp/generators.hpp"
#include "obppp/oracle.hpp"
#include "obppp/rng.hpp"
#include "random_circuits.hpp"
#include "pair_ref.hpp"
#include "ref_circuit.hpp"

using namespace obppp;

namespace {

ref::Mat to_ref(const DenseState& d) {
  ref::Mat m(d.dim());
  m.a = d.data();
  return m;
}

Problem one_qubit_rx(double lambda) {
  Circuit c(1);
  c.add_named_rotation("rx", {0}, 0);
  if (lambda >= 0) c.add_noise(make_depolarizing(lambda), 1, 0, 0);
  return {c, ObservableSum::parse_sparse(1, "Z0"), SparseState::zero(1)};
}

}  // namespace

TEST(DenseEvolve, Examples) {
  Circuit id(2);
  id.add_clifford(CliffordKind::I, {0}, 0);
  const SparseState plus = SparseState::from_entries(
      2, {{{0}, {0}, 0.5}, {{0}, {1}, 0.5}, {{1}, {0}, 0.5}, {{1}, {1}, 0.5}});
  const DenseState a = dense_evolve(id, std::vector<double>{}, plus);
  EXPECT_NEAR(std::abs(a.at(0, 1) - 0.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(a.at(1, 1) - 0.5), 0.0, 1e-15);

  Circuit flip(1);
  flip.add_named_rotation("rx", {0}, 0);
  const DenseState b = dense_evolve(flip, std::vector<double>{M_PI}, SparseState::zero(1));
  EXPECT_NEAR(b.at(1, 1).real(), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(b.at(0, 0)), 0.0, 1e-15);

  Circuit dep(1);
  dep.add_clifford(CliffordKind::H, {0}, 0);
  dep.add_noise(make_depolarizing(1.0), 1, 0, 0);
  const DenseState c = dense_evolve(dep, std::vector<double>{}, SparseState::zero(1));
  EXPECT_NEAR(c.at(0, 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(c.at(1, 1).real(), 0.5, 1e-15);
  EXPECT_NEAR(std::abs(c.at(0, 1)), 0.0, 1e-15);
}

TEST(DenseExpectation, ContinuousAngle) {
  const Problem p = one_qubit_rx(-1);
  EXPECT_NEAR(dense_expectation(p.circuit, std::vector<double>{0.3}, p.observable, p.state), std::cos(0.3), 1e-14);
  // Offset survives: O = Z + 2 I.
  const ObservableSum shifted = ObservableSum::parse_sparse(1, "Z0 + 2*I0");
  EXPECT_NEAR(dense_expectation(p.circuit, std::vector<double>{0.3}, shifted, p.state), std::cos(0.3) + 2, 1e-14);
  const ObservableSum ident = ObservableSum::parse_sparse(1, "1*I0");
  EXPECT_EQ(ident.terms().size(), 0u);
  EXPECT_NEAR(dense_expectation(p.circuit, Theta{1}, ident, p.state) - ident.offset(), 0.0, 1e-15);
}

TEST(DenseEvolve, CapEnforced) {
  Circuit c(11);
  c.add_named_rotation("rx", {0}, 0);
  EXPECT_THROW(dense_evolve(c, Theta{0}, SparseState::zero(11)), CapExceeded);
}

TEST(DenseEvolve, MatchesKrausReference) {
  std::mt19937_64 g(2024);
  std::uniform_real_distribution<double> u(0.0, 2 * M_PI);
  for (int trial = 0; trial < 12; ++trial) {
    testing_util::RandomSpec spec;
    spec.n = 1 + trial % 4;
    spec.n_params = 5;
    const Problem p = testing_util::random_problem(g, spec);
    // Sprinkle in the other builtin kinds.
    Circuit c = p.circuit;
    c.add_noise(make_thermal(0.1, 0.2, {0}), c.ops().size(), 99, 0);
    c.add_noise(make_pauli_channel({{"I", 0.8}, {"Y", 0.2}}, {spec.n - 1}), c.ops().size(), 99, 1);
    if (spec.n >= 2) c.add_noise(make_mmff(PauliString::parse("X"), {0, 1}), c.ops().size(), 99, 2);
    if (spec.n >= 2) c.add_noise(make_depolarizing(0.3, {0, 1}), 2, 99, 3);
    std::vector<double> ang(c.n_params());
    for (auto& a : ang) a = u(g);
    const DenseState d = dense_evolve(c, ang, p.state);
    const ref::Mat want = ref::evolve(c, ang, ref::zero_state(spec.n));
    EXPECT_LT(ref::max_abs_diff(to_ref(d), want), 1e-12) << "trial " << trial;
    EXPECT_LT(std::abs(d.trace() - 1.0), 1e-12);
    EXPECT_LT(d.hermiticity_error(), 1e-12);
  }
}

TEST(DenseEvolve, ClosedFormDepolarizing) {
  Circuit c(5);
  for (std::size_t q = 0; q < 5; ++q) c.add_clifford(CliffordKind::H, {q}, 0);
  c.add_named_rotation("rzz", {0, 3}, 1);
  c.add_noise(make_depolarizing(0.4, {0, 1, 2, 3, 4}), c.ops().size(), 1, 0);
  const std::vector<double> ang = {0.7};
  const DenseState d = dense_evolve(c, ang, SparseState::zero(5));
  Circuit clean = c;
  clean.mutable_noise_sites().clear();
  const DenseState e = dense_evolve(clean, ang, SparseState::zero(5));
  for (std::size_t r = 0; r < 32; ++r) {
    for (std::size_t col = 0; col < 32; ++col) {
      const std::complex<double> want = 0.6 * e.at(r, col) + (r == col ? 0.4 / 32 : 0.0);
      EXPECT_LT(std::abs(d.at(r, col) - want), 1e-14);
    }
  }
}

TEST(DenseState, AllPauliExpectations) {
  std::mt19937_64 g(5);
  testing_util::RandomSpec spec;
  spec.n = 3;
  const Problem p = testing_util::random_problem(g, spec);
  std::vector<double> ang(p.circuit.n_params(), 0.4);
  const DenseState d = dense_evolve(p.circuit, ang, p.state);
  const std::vector<double> all = d.all_pauli_expectations();
  ASSERT_EQ(all.size(), 64u);
  for (std::size_t idx = 0; idx < 64; ++idx) {
    const PauliString w = PauliString::parse(local_label(idx, 3));
    const double want = (ref::trace(ref::pauli(w.str()) * to_ref(d))).real();
    EXPECT_NEAR(all[idx], want, 1e-13);
    EXPECT_NEAR(d.pauli_expectation(w), want, 1e-13);
  }
  double s = 0.0;
  for (double t : all) s += t * t;
  EXPECT_NEAR(s / 8.0, d.purity(), 1e-12);
}

TEST(GridEnumerate, OneQubitExamples) {
  EXPECT_NEAR(grid_enumerate(one_qubit_rx(0.1), "mse"), 0.005, 1e-15);
  EXPECT_NEAR(grid_enumerate(one_qubit_rx(-1), "gradvar", 0), 0.5, 1e-15);
  EXPECT_NEAR(grid_enumerate(one_qubit_rx(0.0), "mse"), 0.0, 1e-15);
  Circuit rz(1);
  rz.add_named_rotation("rz", {0}, 0);
  const Problem toy{rz, ObservableSum::parse_sparse(1, "Z0"), SparseState::zero(1)};
  EXPECT_NEAR(grid_enumerate(toy, "moment2"), 2.0 / 3.0, 1e-14);
  EXPECT_NEAR(grid_enumerate(toy, "moment2_lb"), 1.0 / 6.0, 1e-14);
  EXPECT_THROW(grid_enumerate(toy, "bogus"), ValidationError);
  EXPECT_THROW(grid_enumerate(toy, "gradvar", 3), DimensionError);
}

TEST(GridEnumerate, CapEnforced) {
  const Problem p = gen_line_benchmark(4, 2);  // N_g = 14
  GridOptions opt;
  opt.max_points = 1u << 20;
  EXPECT_THROW(grid_enumerate(p, opt), CapExceeded);
}

TEST(GridEnumerate, AgreesWithReferenceSweep) {
  std::mt19937_64 g(99);
  testing_util::RandomSpec spec;
  spec.n = 2;
  spec.n_params = 3;
  const Problem p = testing_util::random_problem(g, spec);
  GridOptions opt;
  opt.want_moments = true;
  const GridResult r = grid_enumerate(p, opt);
  // Direct sums with the Kraus reference.
  const std::size_t pts = 64;
  std::vector<double> f(pts);
  double mse = 0.0;
  std::vector<std::vector<double>> ts(pts);
  for (std::size_t pt = 0; pt < pts; ++pt) {
    std::vector<double> ang(3);
    for (int k = 0; k < 3; ++k) ang[k] = ((pt >> (2 * k)) & 3) * M_PI / 2;
    const ref::Mat rho = ref::evolve(p.circuit, ang, ref::zero_state(2));
    const ref::Mat rho0 = ref::evolve(p.circuit, ang, ref::zero_state(2), false);
    double v = 0.0, v0 = 0.0;
    for (const auto& t : p.observable.terms()) {
      v += t.coeff * ref::trace(ref::pauli(t.pauli.str()) * rho).real();
      v0 += t.coeff * ref::trace(ref::pauli(t.pauli.str()) * rho0).real();
    }
    f[pt] = v;
    mse += (v - v0) * (v - v0) / pts;
    for (std::size_t idx = 0; idx < 16; ++idx) {
      ts[pt].push_back(ref::trace(ref::pauli(local_label(idx, 2)) * rho).real());
    }
  }
  EXPECT_NEAR(r.mse, mse, 1e-13);
  for (std::size_t k = 0; k < 3; ++k) {
    double gv = 0.0;
    for (std::size_t pt = 0; pt < pts; ++pt) {
      const std::size_t d = (pt >> (2 * k)) & 3, clr = pt & ~(std::size_t{3} << (2 * k));
      const double gk = 0.5 * (f[clr | (((d + 1) & 3) << (2 * k))] - f[clr | (((d + 3) & 3) << (2 * k))]);
      gv += gk * gk / pts;
    }
    EXPECT_NEAR(r.gradvar[k], gv, 1e-13);
  }
  // Two-copy moment from rho (x) rho' directly: E tr(rho rho')^2 - 2 E tr(rho^2) / (D (D + 1)).
  double cross = 0.0, pur = 0.0;
  for (std::size_t a = 0; a < pts; ++a) {
    double pa = 0.0;
    for (double t : ts[a]) pa += t * t / 4.0;
    pur += pa / pts;
    for (std::size_t b = 0; b < pts; ++b) {
      double ov = 0.0;
      for (std::size_t i = 0; i < 16; ++i) ov += ts[a][i] * ts[b][i] / 4.0;
      cross += ov * ov / (pts * pts);
    }
  }
  EXPECT_NEAR(r.moment2, cross - 2.0 * pur / 20.0, 1e-13);
}

TEST(GridEnumerate, GridEqualsContinuum) {
  // Two-fold averages over the grid equal continuous-angle Monte Carlo for
  // channel-free circuits.
  Circuit c(2);
  c.add_named_rotation("rx", {0}, 0);
  c.add_named_rotation("ry", {1}, 0);
  c.add_clifford(CliffordKind::CX, {0, 1}, 1);
  c.add_named_rotation("rzz", {0, 1}, 2);
  c.add_named_rotation("rx", {1}, 3);
  const std::size_t ng = c.n_params();
  std::vector<double> grid_m(256, 0.0);
  for (std::size_t pt = 0; pt < (std::size_t{1} << (2 * ng)); ++pt) {
    Theta th(ng);
    for (std::size_t k = 0; k < ng; ++k) th[k] = (pt >> (2 * k)) & 3;
    const auto t = dense_evolve(c, th, SparseState::zero(2)).all_pauli_expectations();
    for (std::size_t a = 0; a < 16; ++a)
      for (std::size_t b = 0; b < 16; ++b) grid_m[a * 16 + b] += t[a] * t[b] / (1u << (2 * ng));
  }
  constexpr int kDraws = 100000;
  std::vector<double> s1(256, 0.0), s2(256, 0.0);
  RngStream rng(17, 0);
  for (int i = 0; i < kDraws; ++i) {
    std::vector<double> ang(ng);
    for (auto& a : ang) a = 2 * M_PI * rng.uniform();
    const auto t = dense_evolve(c, ang, SparseState::zero(2)).all_pauli_expectations();
    for (std::size_t a = 0; a < 16; ++a)
      for (std::size_t b = 0; b < 16; ++b) {
        const double v = t[a] * t[b];
        s1[a * 16 + b] += v;
        s2[a * 16 + b] += v * v;
      }
  }
  for (std::size_t i = 0; i < 256; ++i) {
    const double mean = s1[i] / kDraws;
    const double se = std::sqrt(std::max(0.0, s2[i] / kDraws - mean * mean) / kDraws);
    EXPECT_NEAR(grid_m[i], mean, 4 * se + 1e-12) << i;
  }
}

TEST(Haar, TwoMoment) {
  for (std::size_t n : {1u, 2u}) {
    const std::size_t d = std::size_t{1} << n, dd = d * d;
    const auto m = haar_2moment(n);
    std::complex<double> tr = 0.0, trs = 0.0;
    for (std::size_t i = 0; i < dd; ++i) tr += m[i * dd + i];
    // tr(M S): S |a1 a2> = |a2 a1>
    for (std::size_t a1 = 0; a1 < d; ++a1)
      for (std::size_t a2 = 0; a2 < d; ++a2) trs += m[(a1 + d * a2) * dd + (a2 + d * a1)];
    EXPECT_NEAR(tr.real(), 1.0, 1e-14);
    EXPECT_NEAR(trs.real(), 1.0, 1e-14);
    // Commutes with U (x) U for a random unitary built from rotations.
    ref::Mat u = ref::Mat::eye(d);
    std::mt19937_64 g(n);
    std::uniform_real_distribution<double> ang(0, 6.28);
    const char* words1[] = {"X", "Y", "Z"};
    const char* words2[] = {"XI", "IY", "ZZ", "XY", "YX", "IZ"};
    for (int k = 0; k < 12; ++k) u = ref::rotation(n == 1 ? words1[k % 3] : words2[k % 6], ang(g)) * u;
    const ref::Mat uu = ref::kron_lsb(u, u);
    ref::Mat mm(dd);
    mm.a = m;
    EXPECT_LT(ref::max_abs_diff(uu * mm, mm * uu), 1e-13);
  }
  EXPECT_THROW(haar_2moment(6), CapExceeded);
}

TEST(RotationDesign, FourPointGridIsExact) {
  EXPECT_LT(rotation_2design_check(PauliString::parse("Z")), 1e-12);
  EXPECT_LT(rotation_2design_check(PauliString::parse("X")), 1e-12);
  EXPECT_LT(rotation_2design_check(PauliString::parse("ZZ")), 1e-12);
  EXPECT_LT(rotation_2design_check(PauliString::parse("XY")), 1e-12);
}

TEST(RotationDesign, OtherGrids) {
  // Any equispaced grid with three or more points integrates the angle
  // frequencies |k| <= 2 of the two-fold channel exactly.
  EXPECT_LT(rotation_2design_check(PauliString::parse("Z"), {0, 2 * M_PI / 3, 4 * M_PI / 3}), 1e-12);
  // Two points do not.
  EXPECT_GT(rotation_2design_check(PauliString::parse("Z"), {0, M_PI}), 0.01);
  EXPECT_GT(rotation_2design_check(PauliString::parse("ZZ"), {0, M_PI / 4, M_PI / 2}), 0.01);
}

// The two-copy Pauli references used by the acceptance runner, checked
// against the dense grid here so that they stand on their own.
TEST(PairReference, LineVarianceMatchesGrid) {
  for (const auto [n, p] : {std::pair{2u, 1u}, std::pair{2u, 2u}, std::pair{3u, 1u}}) {
    SCOPED_TRACE(testing::Message() << "n=" << n << " p=" << p);
    EXPECT_NEAR(ref::pair_moments(ref::line_benchmark_ref(n, p)).variance(), grid_enumerate(gen_line_benchmark(n, p)).variance,
                1e-12);
  }
}

TEST(PairReference, LineLargeDepthLimit) {
  EXPECT_NEAR(ref::pair_moments(ref::line_benchmark_ref(4, 128)).variance(), 2.0 / 7.0, 1e-9);
  EXPECT_NEAR(ref::pair_moments(ref::line_benchmark_ref(2, 128)).variance(), 1.0 / 3.0, 1e-9);
}

TEST(FrameReference, RingMatchesDenseMoment) {
  GridOptions go;
  go.want_moments = true;
  go.noisy = false;
  const GridResult g = grid_enumerate(gen_ring(4, 1, {}), go);
  EXPECT_NEAR(ref::frame_potential(4, ref::ring_ref(4, 1)) - ref::haar_frame_potential(4), g.moment2, 1e-12);
  // n = 8, one block: product of per-qubit 11/32 minus the Haar term
  EXPECT_NEAR(ref::frame_potential(8, ref::ring_ref(8, 1)) - ref::haar_frame_potential(8),
              std::pow(0.34375, 8) - 2.0 / (256.0 * 257.0), 1e-15);
}
