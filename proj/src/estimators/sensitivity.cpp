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
#include <algorithm>
#include <cmath>
#include <memory>
#include <set>
#include <sstream>

#include "detail.hpp"
#include "obppp/errors.hpp"

namespace obppp {

using namespace detail;
using nlohmann::json;

namespace {

// One site handled by central differences of the MSE, both sides sharing
// angles and inner streams.
struct FdSite {
  std::size_t site;
  std::unique_ptr<Engine> up, down;
  double width;
};

struct SensAcc {
  SparseMoments grad;
  MomentAcc mse;
  explicit SensAcc(std::size_t k = 0) : grad(k) {}
  void merge(const SensAcc& o) {
    grad.merge(o.grad);
    mse.merge(o.mse);
  }
};

struct Scratch {
  std::vector<double> d;
  std::vector<char> seen;
  std::vector<uint32_t> touched;
  std::vector<TrackedFactor> factors;
  std::vector<double> prefix;
  PathState state;
};

std::string site_param(const NoiseSite& s) {
  return s.param_name.empty() ? default_noise_param(s.channel.spec().kind) : s.param_name;
}

std::string qubit_list(const std::vector<std::size_t>& q) {
  std::string s;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(q[i]);
  }
  return s;
}

}  // namespace

SensitivityMap estimate_sensitivity_map(const Problem& p, const DiagnosticConfig& cfg,
                                        const SensitivityOptions& opt) {
  cfg.validate();
  Stopwatch clock;
  if (!(opt.fd_step > 0.0)) throw ValidationError("finite-difference step must be positive");
  const auto& sites = p.circuit.noise_sites();
  const std::size_t n_sites = sites.size();

  SensitivityMap map;
  std::vector<bool> use_path(n_sites, false);
  for (std::size_t s = 0; s < n_sites; ++s) {
    const NoiseSite& site = sites[s];
    const ChannelSpec& spec = site.channel.spec();
    SiteSensitivity out;
    out.site = s;
    out.layer = site.layer;
    out.element = site.element;
    out.qubits = site.channel.support();
    out.param = site_param(site);
    const std::string where = "noise site " + std::to_string(s) + " (" + site.channel.label() + ")";
    const bool depolarizing = spec.kind == "depolarizing" && out.param == "lambda";
    if (opt.mode == SensitivityMode::Path && !depolarizing) {
      throw ValidationError(where + ": path-mode sensitivity supports depolarizing lambda only; "
                            "use finite-difference or auto mode");
    }
    if (out.param.empty() || !spec.params.count(out.param)) {
      throw ValidationError(where + ": channel has no continuous parameter to differentiate");
    }
    out.value = spec.params.at(out.param);
    use_path[s] = depolarizing && opt.mode != SensitivityMode::FiniteDifference;
    out.method = use_path[s] ? "path" : "fd";
    map.sites.push_back(out);
  }

  const Engine e(p.circuit, p.state);
  const bool single = single_replicate(e, cfg);
  const bool any_path = std::find(use_path.begin(), use_path.end(), true) != use_path.end();
  if (any_path && cfg.mode == EvalMode::Exact && !e.deterministic()) {
    throw ValidationError("exact path-mode sensitivity needs Pauli-diagonal channels; "
                          "use sampled mode or finite differences");
  }
  const OuterAngles outer(p.circuit, cfg);

  std::vector<FdSite> fd;
  for (std::size_t s = 0; s < n_sites; ++s) {
    if (use_path[s]) continue;
    const double v = map.sites[s].value;
    double hi = v + opt.fd_step, lo = v - opt.fd_step;
    Circuit up, down;
    try {
      up = with_site_param(p.circuit, s, map.sites[s].param, hi);
      up.validate();
    } catch (const ValidationError&) {
      hi = v;
      up = p.circuit;
    }
    if (lo < 0.0) {
      lo = v;
      down = p.circuit;
    } else {
      down = with_site_param(p.circuit, s, map.sites[s].param, lo);
    }
    if (!(hi > lo)) throw ValidationError("noise site " + std::to_string(s) + ": no room for a finite difference");
    fd.push_back({s, std::make_unique<Engine>(up, p.state), std::make_unique<Engine>(down, p.state), hi - lo});
  }

  const ObservableSum& obs = p.observable;
  const std::size_t inner = single ? 1 : cfg.n_tau;
  auto d_squared = [&](const Engine& eng, const Theta& th, double ideal, std::size_t i) {
    const double a = ideal - noisy_value(eng, obs, th, cfg, stream_key({kTagFd, i, 0}));
    if (single_replicate(eng, cfg)) return a * a;
    return a * (ideal - noisy_value(eng, obs, th, cfg, stream_key({kTagFd, i, 1})));
  };

  const SensAcc acc = run_outer(outer.count(), cfg, SensAcc(n_sites), [&](std::size_t i, SensAcc& a) {
    thread_local Scratch sc;
    sc.d.assign(n_sites, 0.0);
    sc.seen.assign(n_sites, 0);
    sc.touched.clear();
    const Theta th = outer.at(i);
    const double ideal = noiseless_expectation(e, obs, th);

    if (any_path || fd.empty()) {
      // Replicate B: tracked walks give the noisy value and, per site, the
      // path sum with that site's factor removed.
      double full = 0.0;
      const uint64_t key_b = stream_key({kTagSens, i, 1});
      for (std::size_t j = 0; j < inner; ++j) {
        for (std::size_t h = 0; h < obs.terms().size(); ++h) {
          sc.state.load(obs.terms()[h].pauli, obs.terms()[h].coeff);
          RngStream rng(cfg.seed, stream_key({key_b, j, h}));
          const double v = e.walk_back_tracked(th, sc.state, e.deterministic() ? nullptr : &rng, sc.factors);
          if (v == 0.0) continue;
          const std::size_t m = sc.factors.size();
          sc.prefix.assign(m + 1, 1.0);
          for (std::size_t t = 0; t < m; ++t) sc.prefix[t + 1] = sc.prefix[t] * sc.factors[t].factor;
          full += v * sc.prefix[m];
          double suffix = 1.0;
          for (std::size_t t = m; t-- > 0;) {
            const uint32_t site = sc.factors[t].site;
            if (!sc.seen[site]) {
              sc.seen[site] = 1;
              sc.touched.push_back(site);
            }
            // d factor / d lambda = -1 on a non-identity support, and the
            // difference ideal - noisy carries one more minus sign.
            sc.d[site] += v * sc.prefix[t] * suffix;
            suffix *= sc.factors[t].factor;
          }
        }
      }
      const double nt = static_cast<double>(inner);
      const double db = ideal - full / nt;
      const double da = single ? db : ideal - noisy_value(e, obs, th, cfg, stream_key({kTagSens, i, 0}));
      a.mse.add(da * db);
      for (uint32_t s : sc.touched) {
        if (use_path[s]) a.grad.add(s, 2.0 * da * sc.d[s] / nt);
      }
    } else {
      const double da = ideal - noisy_value(e, obs, th, cfg, stream_key({kTagSens, i, 0}));
      a.mse.add(single ? da * da : da * (ideal - noisy_value(e, obs, th, cfg, stream_key({kTagSens, i, 1}))));
    }
    for (const FdSite& f : fd) {
      a.grad.add(f.site, (d_squared(*f.up, th, ideal, i) - d_squared(*f.down, th, ideal, i)) / f.width);
    }
  });

  const std::size_t n = outer.count();
  const bool exact = outer.exhaustive();
  for (std::size_t s = 0; s < n_sites; ++s) {
    map.sites[s].gradient = acc.grad.mean(s, n);
    map.sites[s].stderr_ = exact ? 0.0 : acc.grad.stderr_mean(s, n);
  }
  map.mse = base_report("mse", cfg, n, reported_tau(e, cfg), 0, exact);
  map.mse.mean = acc.mse.mean();
  map.mse.stderr_ = exact ? 0.0 : acc.mse.stderr_mean();
  map.mse.negative = map.mse.mean < 0.0;
  map.mse.extra["fd_step"] = opt.fd_step;
  map.mse.wall_time_s = clock.seconds();
  return map;
}

json SensitivityMap::to_json(bool with_timing) const {
  json j;
  j["quantity"] = "sensitivity";
  j["mse"] = mse.to_json(with_timing);
  json arr = json::array();
  for (const auto& s : sites) {
    arr.push_back({{"site", s.site},
                   {"layer", s.layer},
                   {"element", s.element},
                   {"qubits", s.qubits},
                   {"param", s.param},
                   {"value", s.value},
                   {"gradient", s.gradient},
                   {"stderr", s.stderr_},
                   {"method", s.method}});
  }
  j["sites"] = arr;
  return j;
}

std::string SensitivityMap::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "site,layer,element,qubits,param,value,gradient,stderr,method\n";
  for (const auto& s : sites) {
    out << s.site << ',' << s.layer << ',' << s.element << ',' << qubit_list(s.qubits) << ','
        << s.param << ',' << s.value << ',' << s.gradient << ',' << s.stderr_ << ',' << s.method << '\n';
  }
  return out.str();
}

InterventionPlan bottleneck_first_plan(const Problem& p, const DiagnosticConfig& cfg,
                                       double lambda_target, std::size_t budget,
                                       const SensitivityOptions& opt) {
  if (!(lambda_target >= 0.0)) throw ValidationError("lambda target must be non-negative");
  InterventionPlan plan;
  plan.final_problem = p;
  const EstimateReport start = estimate_mse(p, cfg);
  plan.initial_mse = start.mean;
  plan.initial_mse_stderr = start.stderr_;
  if (p.circuit.noise_sites().empty()) return plan;
  plan.hotspots = estimate_sensitivity_map(p, cfg, opt);
  if (budget == 0) return plan;

  SensitivityMap map = plan.hotspots;
  std::set<std::size_t> lowered;
  for (std::size_t step = 0; step < budget; ++step) {
    std::size_t best = map.sites.size();
    for (std::size_t s = 0; s < map.sites.size(); ++s) {
      if (lowered.count(s) || !(map.sites[s].value > lambda_target)) continue;
      if (best == map.sites.size() || std::fabs(map.sites[s].gradient) > std::fabs(map.sites[best].gradient)) {
        best = s;
      }
    }
    if (best == map.sites.size()) break;
    const SiteSensitivity& chosen = map.sites[best];
    InterventionStep st;
    st.site = best;
    st.old_value = chosen.value;
    st.new_value = lambda_target;
    st.gradient = chosen.gradient;
    st.gradient_stderr = chosen.stderr_;
    plan.final_problem.circuit = with_site_param(plan.final_problem.circuit, best, chosen.param, lambda_target);
    lowered.insert(best);
    const EstimateReport m = estimate_mse(plan.final_problem, cfg);
    st.mse = m.mean;
    st.mse_stderr = m.stderr_;
    plan.steps.push_back(st);
    if (step + 1 < budget) map = estimate_sensitivity_map(plan.final_problem, cfg, opt);
  }
  return plan;
}

json InterventionPlan::to_json(bool with_timing) const {
  json j;
  j["quantity"] = "bottleneck_plan";
  j["initial_mse"] = initial_mse;
  j["initial_mse_stderr"] = initial_mse_stderr;
  json steps_j = json::array();
  for (const auto& s : steps) {
    const auto& site = hotspots.sites[s.site];
    steps_j.push_back({{"site", s.site},
                       {"layer", site.layer},
                       {"element", site.element},
                       {"qubits", site.qubits},
                       {"param", site.param},
                       {"old", s.old_value},
                       {"new", s.new_value},
                       {"gradient", s.gradient},
                       {"gradient_stderr", s.gradient_stderr},
                       {"mse", s.mse},
                       {"mse_stderr", s.mse_stderr}});
  }
  j["steps"] = steps_j;
  j["hotspots"] = hotspots.to_json(with_timing);
  return j;
}

std::string InterventionPlan::trajectory_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "step,site,layer,element,old,new,gradient,mse,mse_stderr\n";
  out << "0,,,,,,," << initial_mse << ',' << initial_mse_stderr << '\n';
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const auto& s = steps[k];
    const auto& site = hotspots.sites[s.site];
    out << k + 1 << ',' << s.site << ',' << site.layer << ',' << site.element << ',' << s.old_value << ','
        << s.new_value << ',' << s.gradient << ',' << s.mse << ',' << s.mse_stderr << '\n';
  }
  return out.str();
}

}  // namespace obppp
