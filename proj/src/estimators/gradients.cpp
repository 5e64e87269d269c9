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
#include <numeric>
#include <sstream>

#include "detail.hpp"
#include "obppp/errors.hpp"

namespace obppp {

using namespace detail;
using nlohmann::json;

namespace {

struct GradAcc {
  std::vector<MomentAcc> square, first;  // g_A g_B and (g_A + g_B) / 2 per parameter
  MomentAcc total;
  explicit GradAcc(std::size_t k = 0) : square(k), first(k) {}
  void merge(const GradAcc& o) {
    for (std::size_t j = 0; j < square.size(); ++j) {
      square[j].merge(o.square[j]);
      first[j].merge(o.first[j]);
    }
    total.merge(o.total);
  }
};

}  // namespace

GradVarResult estimate_gradient_variances(const Problem& p, std::vector<std::size_t> params,
                                          const DiagnosticConfig& cfg) {
  cfg.validate();
  Stopwatch clock;
  const std::size_t n_g = p.circuit.n_params();
  if (params.empty()) {
    params.resize(n_g);
    std::iota(params.begin(), params.end(), std::size_t{0});
  }
  for (std::size_t k : params) {
    if (k >= n_g) {
      throw DimensionError("parameter index " + std::to_string(k) + " out of range for " +
                           std::to_string(n_g) + " parameters");
    }
  }
  const Engine e(p.circuit, p.state);
  const OuterAngles outer(p.circuit, cfg);
  const bool single = single_replicate(e, cfg);
  const ObservableSum& obs = p.observable;

  auto gradient = [&](std::size_t i, std::size_t k, const Theta& th, uint64_t rep) {
    const uint64_t salt = stream_key({kTagGrad, i, params[k], rep});
    const double up = noisy_value(e, obs, shift_theta(th, params[k], +1), cfg, stream_key({salt, 1}));
    const double dn = noisy_value(e, obs, shift_theta(th, params[k], -1), cfg, stream_key({salt, 2}));
    return 0.5 * (up - dn);
  };

  const GradAcc acc = run_outer(outer.count(), cfg, GradAcc(params.size()), [&](std::size_t i, GradAcc& a) {
    const Theta th = outer.at(i);
    double total = 0.0;
    for (std::size_t k = 0; k < params.size(); ++k) {
      const double ga = gradient(i, k, th, 0);
      const double gb = single ? ga : gradient(i, k, th, 1);
      a.square[k].add(ga * gb);
      a.first[k].add(0.5 * (ga + gb));
      total += ga * gb;
    }
    a.total.add(total);
  });

  const bool exact = outer.exhaustive();
  GradVarResult res;
  res.sum = base_report("gradvar_sum", cfg, outer.count(), reported_tau(e, cfg), 0, exact);
  res.sum.mean = acc.total.mean();
  res.sum.stderr_ = exact ? 0.0 : acc.total.stderr_mean();
  res.sum.negative = res.sum.mean < 0.0;
  res.sum.extra["n_params"] = static_cast<double>(params.size());
  for (std::size_t k = 0; k < params.size(); ++k) {
    ParamGradVar g;
    g.param = params[k];
    g.gradvar = acc.square[k].mean();
    g.stderr_ = exact ? 0.0 : acc.square[k].stderr_mean();
    g.mean_gradient = acc.first[k].mean();
    g.mean_gradient_stderr = exact ? 0.0 : acc.first[k].stderr_mean();
    res.params.push_back(g);
  }
  res.sum.wall_time_s = clock.seconds();
  return res;
}

EstimateReport estimate_gradient_variance(const Problem& p, std::size_t k, const DiagnosticConfig& cfg) {
  GradVarResult g = estimate_gradient_variances(p, {k}, cfg);
  EstimateReport r = g.sum;
  r.quantity = "gradvar";
  r.extra.erase("n_params");
  r.extra["param"] = static_cast<double>(k);
  r.extra["mean_gradient"] = g.params[0].mean_gradient;
  r.extra["mean_gradient_stderr"] = g.params[0].mean_gradient_stderr;
  return r;
}

EstimateReport sum_gradient_variance(const Problem& p, const DiagnosticConfig& cfg) {
  return estimate_gradient_variances(p, {}, cfg).sum;
}

json GradVarResult::to_json(bool with_timing) const {
  json j = sum.to_json(with_timing);
  json ps = json::array();
  for (const auto& g : params) {
    ps.push_back({{"param", g.param},
                  {"gradvar", g.gradvar},
                  {"stderr", g.stderr_},
                  {"mean_gradient", g.mean_gradient},
                  {"mean_gradient_stderr", g.mean_gradient_stderr}});
  }
  j["params"] = ps;
  j["n_params"] = params.size();
  return j;
}

std::string GradVarResult::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "param,gradvar,stderr,mean_gradient,mean_gradient_stderr\n";
  for (const auto& g : params) {
    out << g.param << ',' << g.gradvar << ',' << g.stderr_ << ',' << g.mean_gradient << ','
        << g.mean_gradient_stderr << '\n';
  }
  out << "sum," << sum.mean << ',' << sum.stderr_ << ",,\n";
  return out.str();
}

}  // namespace obppp
