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

#include <bit>
#include <cmath>

#include "obppp/errors.hpp"
#include "obppp/oracle.hpp"

namespace obppp {

using cd = std::complex<double>;

GridResult grid_enumerate(const Problem& p, const GridOptions& opt) {
  const Circuit& c = p.circuit;
  const std::size_t ng = c.n_params();
  if (2 * ng >= 63 || (std::size_t{1} << (2 * ng)) > opt.max_points) {
    throw CapExceeded("grid enumeration over 4^" + std::to_string(ng) + " points exceeds the cap of " +
                      std::to_string(opt.max_points));
  }
  if (opt.want_moments && c.n() > 5) throw CapExceeded("two-copy moments limited to 5 qubits");
  const std::size_t points = std::size_t{1} << (2 * ng);
  const std::size_t d = std::size_t{1} << c.n();
  const std::size_t np = d * d;

  OracleOptions noisy{10, opt.noisy};
  OracleOptions clean{10, false};
  std::vector<double> f(points);
  std::vector<double> pm;  // M = E t t^T, row-major np x np
  if (opt.want_moments) pm.assign(np * np, 0.0);
  GridResult r;
  double sum = 0.0, mse = 0.0;
  Theta th(ng, 0);
  for (std::size_t pt = 0; pt < points; ++pt) {
    for (std::size_t k = 0; k < ng; ++k) th[k] = (pt >> (2 * k)) & 3;
    const DenseState rho = dense_evolve(c, th, p.state, noisy);
    double v = 0.0;
    for (const auto& t : p.observable.terms()) v += t.coeff * rho.pauli_expectation(t.pauli);
    f[pt] = v;
    sum += v;
    if (opt.noisy && !c.noise_sites().empty()) {
      const DenseState ideal = dense_evolve(c, th, p.state, clean);
      double v0 = 0.0;
      for (const auto& t : p.observable.terms()) v0 += t.coeff * ideal.pauli_expectation(t.pauli);
      mse += (v0 - v) * (v0 - v);
    }
    if (opt.want_moments) {
      const std::vector<double> t = rho.all_pauli_expectations();
      for (std::size_t a = 0; a < np; ++a) {
        if (t[a] == 0.0) continue;
        double* row = &pm[a * np];
        for (std::size_t b = 0; b < np; ++b) row[b] += t[a] * t[b];
      }
    }
  }
  const double inv = 1.0 / static_cast<double>(points);
  const double mean = sum * inv;
  double sq = 0.0;
  for (double v : f) sq += (v - mean) * (v - mean);
  r.variance = sq * inv;
  r.mse = mse * inv;
  r.gradvar.assign(ng, 0.0);
  r.grad_mean.assign(ng, 0.0);
  for (std::size_t k = 0; k < ng; ++k) {
    double g1 = 0.0, g2 = 0.0;
    for (std::size_t pt = 0; pt < points; ++pt) {
      const std::size_t dk = (pt >> (2 * k)) & 3;
      const std::size_t clr = pt & ~(std::size_t{3} << (2 * k));
      const std::size_t up = clr | (((dk + 1) & 3) << (2 * k));
      const std::size_t dn = clr | (((dk + 3) & 3) << (2 * k));
      const double g = 0.5 * (f[up] - f[dn]);
      g1 += g;
      g2 += g * g;
    }
    r.grad_mean[k] = g1 * inv;
    r.gradvar[k] = g2 * inv;
    r.gradvar_sum += r.gradvar[k];
  }
  if (opt.want_moments) {
    const double D = static_cast<double>(d);
    double fro = 0.0, diag = 0.0, lb = 0.0;
    for (std::size_t a = 0; a < np; ++a) {
      for (std::size_t b = 0; b < np; ++b) {
        const double m = pm[a * np + b] * inv;
        fro += m * m;
      }
      const double mdiag = pm[a * np + a] * inv;
      diag += mdiag;
      lb += mdiag * mdiag - 2.0 / (D + 1.0) * mdiag;
    }
    const double npd = static_cast<double>(np);
    r.moment2 = fro / (D * D) - 2.0 / (D + 1.0) * diag / npd;
    r.moment2_lb = lb / npd;
  }
  return r;
}

double grid_enumerate(const Problem& p, const std::string& functional, std::size_t k) {
  GridOptions opt;
  opt.want_moments = functional == "moment2" || functional == "moment2_lb";
  const GridResult r = grid_enumerate(p, opt);
  if (functional == "mse") return r.mse;
  if (functional == "variance") return r.variance;
  if (functional == "gradvar") {
    if (k >= r.gradvar.size()) throw DimensionError("parameter index out of range");
    return r.gradvar[k];
  }
  if (functional == "gradvar_sum") return r.gradvar_sum;
  if (functional == "moment2") return r.moment2;
  if (functional == "moment2_lb") return r.moment2_lb;
  throw ValidationError("unknown grid functional '" + functional + "'");
}

std::vector<cd> haar_2moment(std::size_t n) {
  if (n > 5) throw CapExceeded("two-copy Haar moment limited to 5 qubits");
  const std::size_t d = std::size_t{1} << n;
  const std::size_t dd = d * d;
  const double norm = 1.0 / (static_cast<double>(d) * static_cast<double>(d + 1));
  std::vector<cd> m(dd * dd, 0.0);
  // basis |a1, a2> has index a1 + d a2
  for (std::size_t a1 = 0; a1 < d; ++a1) {
    for (std::size_t a2 = 0; a2 < d; ++a2) {
      const std::size_t i = a1 + d * a2;
      const std::size_t s = a2 + d * a1;
      m[i * dd + i] += norm;
      m[s * dd + i] += norm;
    }
  }
  return m;
}

namespace {

// Dense matrix of a Pauli word on n <= 2 qubits, bit q = qubit q.
std::vector<cd> word_matrix(const PauliString& p) {
  const std::size_t d = std::size_t{1} << p.n();
  std::vector<cd> m(d * d, 0.0);
  uint64_t x = 0, z = 0;
  for (std::size_t q = 0; q < p.n(); ++q) {
    x |= uint64_t{code_x(p.get(q))} << q;
    z |= uint64_t{code_z(p.get(q))} << q;
  }
  const unsigned y = std::popcount(x & z);
  for (uint64_t a = 0; a < d; ++a) {
    const unsigned s = std::popcount(z & a) & 1;
    const unsigned k = (y + 2 * s) & 3;
    const cd ph = k == 0 ? cd{1, 0} : k == 1 ? cd{0, 1} : k == 2 ? cd{-1, 0} : cd{0, -1};
    m[(a ^ x) * d + a] = ph;
  }
  return m;
}

std::vector<cd> kron(const std::vector<cd>& a, std::size_t da, const std::vector<cd>& b, std::size_t db) {
  // (a (x) b) with a acting on the high index
  std::vector<cd> m(da * db * da * db);
  const std::size_t d = da * db;
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < da; ++j)
      for (std::size_t k = 0; k < db; ++k)
        for (std::size_t l = 0; l < db; ++l) m[(i * db + k) * d + (j * db + l)] = a[i * da + j] * b[k * db + l];
  return m;
}

}  // namespace

double rotation_2design_check(const PauliString& axis, const std::vector<double>& grid_angles) {
  if (axis.n() > 2) throw CapExceeded("rotation 2-design check limited to 2-qubit axes");
  if (axis.is_identity()) throw ValidationError("rotation axis must not be the identity");
  std::vector<double> grid = grid_angles;
  if (grid.empty()) grid = {0.0, M_PI / 2, M_PI, 3 * M_PI / 2};
  const std::size_t d = std::size_t{1} << axis.n();
  const std::vector<cd> P = word_matrix(axis);
  std::vector<cd> I(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) I[i * d + i] = 1.0;
  // W(theta) = (R(theta) (x) R(-theta))^{(x)2}, R = c I - i s P. Each factor
  // is c I + s B; the four-fold product is a sum over which factors take B.
  const std::vector<cd> A[4] = {I, I, I, I};
  std::vector<cd> B[4];
  for (int f = 0; f < 4; ++f) {
    B[f].resize(d * d);
    for (std::size_t i = 0; i < d * d; ++i) B[f][i] = (f % 2 == 0 ? cd{0, -1} : cd{0, 1}) * P[i];
  }
  const std::size_t D4 = d * d * d * d;
  std::vector<std::vector<cd>> terms(16);
  for (unsigned mask = 0; mask < 16; ++mask) {
    std::vector<cd> m = (mask & 1) ? B[0] : A[0];
    std::size_t dm = d;
    for (int f = 1; f < 4; ++f) {
      m = kron(m, dm, (mask >> f) & 1 ? B[f] : A[f], d);
      dm *= d;
    }
    terms[mask] = std::move(m);
  }
  // Continuous average of c^{4-j} s^j over theta uniform: E c^4 = E s^4 = 3/8,
  // E c^2 s^2 = 1/8, odd powers vanish.
  auto cont_moment = [](int j) { return j == 0 || j == 4 ? 0.375 : j == 2 ? 0.125 : 0.0; };
  std::vector<cd> cont(D4 * D4, 0.0), disc(D4 * D4, 0.0);
  for (unsigned mask = 0; mask < 16; ++mask) {
    const int j = std::popcount(mask);
    double dm = 0.0;
    for (double th : grid) dm += std::pow(std::cos(th / 2), 4 - j) * std::pow(std::sin(th / 2), j);
    dm /= static_cast<double>(grid.size());
    const double cm = cont_moment(j);
    for (std::size_t i = 0; i < D4 * D4; ++i) {
      cont[i] += cm * terms[mask][i];
      disc[i] += dm * terms[mask][i];
    }
  }
  double dev = 0.0;
  for (std::size_t i = 0; i < cont.size(); ++i) dev = std::max(dev, std::abs(cont[i] - disc[i]));
  return dev;
}

}  // namespace obppp
