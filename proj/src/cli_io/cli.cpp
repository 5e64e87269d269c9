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
#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "obppp/circuit_io.hpp"
#include "obppp/cli.hpp"
#include "obppp/errors.hpp"
#include "obppp/generators.hpp"
#include "obppp/oracle.hpp"
#include "obppp/parallel.hpp"

namespace obppp {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kManifestName = "manifest.json";

// Sample-control flags shared by every estimating command. Unset flags
// leave the config file or default value alone.
struct SampleFlags {
  std::optional<std::string> config_path;
  std::optional<std::size_t> n_theta, n_tau, n_sigma, threads, chunk;
  std::optional<uint64_t> seed;
  std::optional<std::string> mode;

  void add_to(CLI::App* app, bool with_sigma) {
    app->add_option("--config", config_path, "JSON config file (CLI flags take precedence)");
    app->add_option("--n-theta", n_theta, "outer angle samples");
    app->add_option("--n-tau", n_tau, "inner branch samples");
    if (with_sigma) app->add_option("--n-sigma", n_sigma, "Pauli samples (expressibility)");
    app->add_option("--seed", seed, "master seed");
    app->add_option("--threads", threads, "worker threads (default: OBPPP_THREADS or all cores)");
    app->add_option("--chunk", chunk, "outer samples per work unit");
    app->add_option("--mode", mode, "sampled | exact");
  }

  DiagnosticConfig resolve(const std::string& kind, SensitivityOptions* sens, RunManifest* m) const {
    DiagnosticConfig cfg = default_config(kind);
    if (config_path) {
      cfg_from_file(*config_path, cfg, sens);
      if (m) m->add_input(*config_path);
    }
    if (n_theta) cfg.n_theta = *n_theta;
    if (n_tau) cfg.n_tau = *n_tau;
    if (n_sigma) cfg.n_sigma = *n_sigma;
    if (seed) cfg.seed = *seed;
    if (threads) cfg.threads = *threads;
    if (chunk) cfg.chunk = *chunk;
    if (mode) cfg.mode = parse_eval_mode(*mode);
    if (cfg.threads == 0) cfg.threads = default_thread_count();
    cfg.validate();
    return cfg;
  }

  static void cfg_from_file(const std::string& path, DiagnosticConfig& cfg, SensitivityOptions* sens) {
    apply_config_json(read_json_file(path), cfg, sens);
  }
};

// Collects files under an output directory and writes the manifest last.
// Without a directory nothing is written and the primary payload only goes
// to stdout.
class OutputSet {
 public:
  OutputSet(std::string dir, RunManifest& manifest) : dir_(std::move(dir)), manifest_(manifest) {
    if (!dir_.empty()) fs::create_directories(dir_);
  }
  bool active() const { return !dir_.empty(); }

  void json_file(const std::string& name, json payload) {
    if (!active()) return;
    payload["manifest"] = kManifestName;
    write_text(name, payload.dump(2) + "\n");
  }
  void csv_file(const std::string& name, const std::string& csv) {
    if (!active()) return;
    write_text(name, std::string("# manifest=") + kManifestName + "\n" + csv);
  }
  void finish() {
    if (active()) manifest_.write((fs::path(dir_) / kManifestName).string());
  }

 private:
  void write_text(const std::string& name, const std::string& text) {
    const fs::path path = fs::path(dir_) / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
    f << text;
    if (!f) throw std::runtime_error("write failed for '" + path.string() + "'");
    manifest_.add_output(name);
  }

  std::string dir_;
  RunManifest& manifest_;
};

std::vector<std::size_t> parse_index_list(const std::string& text, const std::string& what) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) {
      throw ValidationError(what + ": '" + tok + "' is not a non-negative integer");
    }
    out.push_back(std::stoull(tok));
  }
  if (out.empty()) throw ValidationError(what + " is empty");
  return out;
}

std::vector<double> parse_real_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || tok.empty()) throw ValidationError(what + ": '" + tok + "' is not a number");
    out.push_back(v);
  }
  return out;
}

// "depolarizing:lambda=0.01" or "thermal:gamma=0.1,lambda=0.02".
NoiseTemplate parse_noise(const std::string& text, const std::string& mode) {
  NoiseTemplate t;
  if (mode == "gate") t.mode = NoiseTemplate::Mode::Gate;
  else if (mode == "qubit") t.mode = NoiseTemplate::Mode::Qubit;
  else throw ValidationError("--noise-mode must be gate or qubit");
  if (text.empty() || text == "none") return t;
  ChannelSpec spec;
  const auto colon = text.find(':');
  spec.kind = text.substr(0, colon);
  if (spec.kind != "depolarizing" && spec.kind != "amplitude_damping" && spec.kind != "thermal") {
    throw ValidationError("--noise kind must be depolarizing, amplitude_damping or thermal");
  }
  if (colon != std::string::npos) {
    std::stringstream ss(text.substr(colon + 1));
    std::string kv;
    while (std::getline(ss, kv, ',')) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ValidationError("--noise entry '" + kv + "' needs key=value");
      spec.params[kv.substr(0, eq)] = parse_real_list(kv.substr(eq + 1), "--noise " + kv.substr(0, eq)).at(0);
    }
  }
  spec.support = {0};
  build_channel(spec);  // rejects bad keys and values before generating
  t.channel = spec;
  return t;
}

void print_json(std::ostream& out, const json& j) { out << j.dump(2) << "\n"; }

json l1_json(double variance, const ObservableSum& obs) {
  const L1Bound b = l1_expressibility_bound(variance, obs);
  return {{"value", b.value}, {"informative", b.informative}};
}

// ---------------------------------------------------------------- diagnose

struct DiagnoseArgs {
  std::string kind, circuit, out_dir, param = "all", sens_mode;
  std::optional<double> fd_step;
  SampleFlags flags;
};

int cmd_diagnose(const DiagnoseArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  RunManifest manifest("diagnose " + a.kind, argv);
  const Problem p = load_problem(a.circuit);
  manifest.add_input(a.circuit);
  SensitivityOptions sens;
  DiagnosticConfig cfg = a.flags.resolve(a.kind, &sens, &manifest);
  if (!a.sens_mode.empty()) sens.mode = parse_sensitivity_mode(a.sens_mode);
  if (a.fd_step) sens.fd_step = *a.fd_step;
  manifest.set_seed(cfg.seed);
  manifest.set_config(cfg.to_json());

  OutputSet files(a.out_dir, manifest);
  json payload;
  if (a.kind == "mse" || a.kind == "variance" || a.kind == "expressibility" || a.kind == "expressibility-lb") {
    EstimateReport r;
    if (a.kind == "mse") r = estimate_mse(p, cfg);
    else if (a.kind == "variance") r = estimate_variance(p, cfg);
    else if (a.kind == "expressibility") r = estimate_expressibility_hs(p, cfg);
    else r = estimate_expressibility_lower_bound(p, cfg);
    payload = r.to_json(false);
    if (a.kind == "variance") payload["l1_bound"] = l1_json(r.mean, p.observable);
    manifest.add_timing(a.kind, r.wall_time_s);
    files.json_file(a.kind + ".json", payload);
  } else if (a.kind == "gradvar") {
    std::vector<std::size_t> params;
    if (a.param != "all") params = parse_index_list(a.param, "--param");
    const GradVarResult r = estimate_gradient_variances(p, params, cfg);
    payload = r.to_json(false);
    manifest.add_timing(a.kind, r.sum.wall_time_s);
    files.json_file("gradvar.json", payload);
    files.csv_file("gradvar.csv", r.to_csv());
  } else if (a.kind == "sensitivity") {
    const SensitivityMap r = estimate_sensitivity_map(p, cfg, sens);
    payload = r.to_json(false);
    manifest.add_timing(a.kind, r.mse.wall_time_s);
    files.json_file("sensitivity.json", payload);
    files.csv_file("sensitivity.csv", r.to_csv());
  } else {
    throw ValidationError("unknown diagnose kind '" + a.kind + "'");
  }
  files.finish();
  if (files.active()) payload["manifest"] = kManifestName;
  print_json(out, payload);
  return kExitOk;
}

// --------------------------------------------------------------- benchmark

struct BenchmarkArgs {
  std::size_t n = 4, p = 512, trials = 1;
  std::string samples = "100,1000,10000,100000";
  std::string noise, noise_mode = "gate";
  std::string out_dir;
  SampleFlags flags;
};

int cmd_benchmark(const BenchmarkArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  RunManifest manifest("benchmark", argv);
  DiagnosticConfig base = a.flags.resolve("benchmark", nullptr, &manifest);
  if (a.trials < 1) throw ValidationError("--trials must be at least 1");
  const std::vector<std::size_t> sizes = parse_index_list(a.samples, "--samples");
  const Problem prob = gen_line_benchmark(a.n, a.p, parse_noise(a.noise, a.noise_mode));
  const double target = 2.0 / (2.0 * static_cast<double>(a.n) - 1.0);
  manifest.set_seed(base.seed);
  manifest.set_config(base.to_json());

  std::ostringstream csv;
  csv.precision(17);
  csv << "n_samples,trials,mean,std,mean_stderr,target,rel_error,rel_error_mean\n";
  json rows = json::array();
  double wall = 0.0;
  for (const std::size_t ns : sizes) {
    MomentAcc est;
    KahanSum se, rel;
    for (std::size_t t = 0; t < a.trials; ++t) {
      DiagnosticConfig cfg = base;
      cfg.n_theta = ns;
      cfg.seed = base.seed + t;
      const EstimateReport r = estimate_variance(prob, cfg);
      wall += r.wall_time_s;
      est.add(r.mean);
      se.add(r.stderr_);
      rel.add(std::fabs(r.mean - target) / target);
    }
    const double mean = est.mean();
    const double tn = static_cast<double>(a.trials);
    const double rel_err = std::fabs(mean - target) / target;
    json row = {{"n_samples", ns}, {"trials", a.trials}, {"mean", mean},
                {"mean_stderr", se.value() / tn}, {"target", target},
                {"rel_error", rel_err}, {"rel_error_mean", rel.value() / tn}};
    csv << ns << ',' << a.trials << ',' << mean << ',';
    if (a.trials > 1) {
      const double sd = std::sqrt(est.variance());
      csv << sd;
      row["std"] = sd;
    } else {
      row["std"] = nullptr;
    }
    csv << ',' << se.value() / tn << ',' << target << ',' << rel_err << ',' << rel.value() / tn << '\n';
    rows.push_back(row);
  }
  manifest.add_timing("benchmark", wall);
  json payload = {{"quantity", "benchmark"}, {"n", a.n}, {"p", a.p}, {"n_params", prob.circuit.n_params()},
                  {"target", target}, {"config", base.to_json()}, {"rows", rows}};
  OutputSet files(a.out_dir, manifest);
  files.json_file("benchmark.json", payload);
  files.csv_file("convergence.csv", csv.str());
  files.finish();
  out << csv.str();
  return kExitOk;
}

// -------------------------------------------------------------------- plan

struct PlanArgs {
  double epsilon = 0.05, delta = 0.01;
  std::optional<double> l1;
  std::string circuit, out_dir;
};

int cmd_plan(const PlanArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  RunManifest manifest("plan", argv);
  double l1 = 0.0;
  if (a.l1 && !a.circuit.empty()) throw ValidationError("give either --l1 or --circuit, not both");
  if (a.l1) {
    l1 = *a.l1;
  } else if (!a.circuit.empty()) {
    l1 = load_problem(a.circuit).observable.pauli_l1();
    manifest.add_input(a.circuit);
  } else {
    throw ValidationError("plan needs --l1 or --circuit");
  }
  const SamplePlan s = plan_samples(a.epsilon, a.delta, l1);
  json payload = {{"quantity", "sample_plan"}, {"epsilon", a.epsilon}, {"delta", a.delta},
                  {"pauli_l1", l1}, {"n_theta", s.n_theta}, {"n_tau", s.n_tau}};
  OutputSet files(a.out_dir, manifest);
  files.json_file("plan.json", payload);
  files.finish();
  if (files.active()) payload["manifest"] = kManifestName;
  print_json(out, payload);
  return kExitOk;
}

// -------------------------------------------------------------- bottleneck

struct BottleneckArgs {
  std::string circuit, out_dir, sens_mode;
  std::size_t budget = 3;
  double lambda_target = 0.0;
  std::optional<double> fd_step;
  SampleFlags flags;
};

int cmd_bottleneck(const BottleneckArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  RunManifest manifest("bottleneck", argv);
  const Problem p = load_problem(a.circuit);
  manifest.add_input(a.circuit);
  SensitivityOptions sens;
  const DiagnosticConfig cfg = a.flags.resolve("bottleneck", &sens, &manifest);
  if (!a.sens_mode.empty()) sens.mode = parse_sensitivity_mode(a.sens_mode);
  if (a.fd_step) sens.fd_step = *a.fd_step;
  manifest.set_seed(cfg.seed);
  manifest.set_config(cfg.to_json());
  const auto t0 = std::chrono::steady_clock::now();
  const InterventionPlan plan = bottleneck_first_plan(p, cfg, a.lambda_target, a.budget, sens);
  manifest.add_timing("bottleneck",
                      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  json payload = plan.to_json(false);
  payload["budget"] = a.budget;
  payload["lambda_target"] = a.lambda_target;
  OutputSet files(a.out_dir, manifest);
  files.json_file("bottleneck.json", payload);
  files.csv_file("trajectory.csv", plan.trajectory_csv());
  files.csv_file("hotspots.csv", plan.hotspots.to_csv());
  if (files.active()) {
    json fin = problem_to_json(plan.final_problem);
    files.json_file("final_circuit.json", fin);
  }
  files.finish();
  if (files.active()) payload["manifest"] = kManifestName;
  print_json(out, payload);
  return kExitOk;
}

// ------------------------------------------------------------------ oracle

struct OracleArgs {
  std::string quantity, circuit, out_dir, theta, angles;
  std::optional<std::size_t> param;
  std::size_t max_points = std::size_t{1} << 22;
  bool noiseless = false;
};

int cmd_oracle(const OracleArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  RunManifest manifest("oracle " + a.quantity, argv);
  const Problem p = load_problem(a.circuit);
  manifest.add_input(a.circuit);
  json payload = {{"quantity", a.quantity}, {"oracle", true}, {"noisy", !a.noiseless}};
  if (a.quantity == "expectation") {
    OracleOptions opt;
    opt.noisy = !a.noiseless;
    std::vector<double> ang;
    if (!a.theta.empty() && !a.angles.empty()) throw ValidationError("give --theta or --angles, not both");
    if (!a.theta.empty()) {
      Theta th;
      for (const std::size_t k : parse_index_list(a.theta, "--theta")) {
        if (k > 3) throw ValidationError("--theta entries are grid indices 0..3");
        th.push_back(static_cast<uint8_t>(k));
      }
      if (th.size() != p.circuit.n_params()) throw DimensionError("--theta needs one index per parameter");
      ang = to_angles(th);
      payload["theta"] = th;
    } else if (!a.angles.empty()) {
      ang = parse_real_list(a.angles, "--angles");
      if (ang.size() != p.circuit.n_params()) throw DimensionError("--angles needs one value per parameter");
    } else {
      throw ValidationError("oracle expectation needs --theta or --angles");
    }
    payload["angles"] = ang;
    payload["value"] = dense_expectation(p.circuit, ang, p.observable, p.state, opt);
  } else {
    GridOptions opt;
    opt.max_points = a.max_points;
    opt.noisy = !a.noiseless;
    opt.want_moments = a.quantity == "moment2" || a.quantity == "moment2_lb" || a.quantity == "all";
    const GridResult r = grid_enumerate(p, opt);
    if (a.quantity == "mse") payload["value"] = r.mse;
    else if (a.quantity == "variance") payload["value"] = r.variance;
    else if (a.quantity == "gradvar_sum") payload["value"] = r.gradvar_sum;
    else if (a.quantity == "moment2") payload["value"] = r.moment2;
    else if (a.quantity == "moment2_lb") payload["value"] = r.moment2_lb;
    else if (a.quantity == "gradvar") {
      if (a.param) {
        if (*a.param >= r.gradvar.size()) throw DimensionError("--param out of range");
        payload["param"] = *a.param;
        payload["value"] = r.gradvar[*a.param];
      } else {
        payload["values"] = r.gradvar;
        payload["value"] = r.gradvar_sum;
      }
    } else if (a.quantity == "all") {
      payload["mse"] = r.mse;
      payload["variance"] = r.variance;
      payload["gradvar"] = r.gradvar;
      payload["grad_mean"] = r.grad_mean;
      payload["gradvar_sum"] = r.gradvar_sum;
      payload["moment2"] = r.moment2;
      payload["moment2_lb"] = r.moment2_lb;
    } else {
      throw ValidationError("unknown oracle quantity '" + a.quantity + "'");
    }
  }
  OutputSet files(a.out_dir, manifest);
  files.json_file("oracle_" + a.quantity + ".json", payload);
  files.finish();
  if (files.active()) payload["manifest"] = kManifestName;
  print_json(out, payload);
  return kExitOk;
}

// --------------------------------------------------------------------- gen

struct GenArgs {
  std::string family, noise, noise_mode = "gate", observable, output, two_qubit = "rzz";
  std::size_t n = 4, p = 1, rows = 3, cols = 3, blocks = 1;
};

int cmd_gen(const GenArgs& a, std::ostream& out) {
  const NoiseTemplate noise = parse_noise(a.noise, a.noise_mode);
  Problem prob;
  auto obs_for = [&](std::size_t n) -> std::optional<ObservableSum> {
    if (a.observable.empty()) return std::nullopt;
    return ObservableSum::parse_sparse(n, a.observable);
  };
  if (a.family == "line") {
    prob = gen_line_benchmark(a.n, a.p, noise);
    if (!a.observable.empty()) prob.observable = *obs_for(a.n);
  } else if (a.family == "grid") {
    prob = gen_grid_chip(a.rows, a.cols, a.blocks, a.two_qubit, noise, obs_for(a.rows * a.cols));
  } else if (a.family == "ring") {
    prob = gen_ring(a.n, a.blocks, noise, obs_for(a.n));
  } else {
    throw ValidationError("unknown generator '" + a.family + "'");
  }
  const json j = problem_to_json(prob);
  if (a.output.empty()) print_json(out, j);
  else save_json(j, a.output);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pauli-path diagnostics for noisy parameterized circuits", "obppp"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  DiagnoseArgs da;
  auto* diag = app.add_subcommand("diagnose", "estimate one diagnostic for a circuit file");
  diag->add_option("kind", da.kind, "mse | variance | sensitivity | gradvar | expressibility | expressibility-lb")
      ->required()
      ->check(CLI::IsMember({"mse", "variance", "sensitivity", "gradvar", "expressibility", "expressibility-lb"}));
  diag->add_option("--circuit", da.circuit, "circuit JSON file")->required();
  diag->add_option("--out", da.out_dir, "output directory for report files and manifest");
  diag->add_option("--param", da.param, "gradvar: 'all' or comma-separated parameter indices");
  diag->add_option("--sensitivity-mode", da.sens_mode, "auto | path | fd");
  diag->add_option("--fd-step", da.fd_step, "finite-difference step");
  da.flags.add_to(diag, true);

  BenchmarkArgs ba;
  auto* bench = app.add_subcommand("benchmark", "variance convergence on the line benchmark");
  bench->add_option("--n", ba.n, "qubits");
  bench->add_option("--p", ba.p, "blocks");
  bench->add_option("--samples", ba.samples, "comma-separated N_theta sweep");
  bench->add_option("--trials", ba.trials, "independent runs per sweep point");
  bench->add_option("--noise", ba.noise, "KIND:key=value,... or none");
  bench->add_option("--noise-mode", ba.noise_mode, "gate | qubit");
  bench->add_option("--out", ba.out_dir, "output directory");
  ba.flags.add_to(bench, false);

  PlanArgs pa;
  auto* plan = app.add_subcommand("plan", "sample counts for a target accuracy");
  plan->add_option("--epsilon", pa.epsilon, "absolute error");
  plan->add_option("--delta", pa.delta, "failure probability");
  plan->add_option("--l1", pa.l1, "Pauli l1 norm of the observable");
  plan->add_option("--circuit", pa.circuit, "take the l1 norm from this circuit's observable");
  plan->add_option("--out", pa.out_dir, "output directory");

  BottleneckArgs bka;
  auto* bott = app.add_subcommand("bottleneck", "bottleneck-first noise reduction plan");
  bott->add_option("--circuit", bka.circuit, "circuit JSON file")->required();
  bott->add_option("--budget", bka.budget, "number of sites to improve");
  bott->add_option("--lambda-target", bka.lambda_target, "parameter value an improved site is set to");
  bott->add_option("--sensitivity-mode", bka.sens_mode, "auto | path | fd");
  bott->add_option("--fd-step", bka.fd_step, "finite-difference step");
  bott->add_option("--out", bka.out_dir, "output directory");
  bka.flags.add_to(bott, false);

  OracleArgs oa;
  auto* orc = app.add_subcommand("oracle", "exact dense-matrix reference values for small circuits");
  orc->add_option("quantity", oa.quantity, "mse | variance | gradvar | gradvar_sum | moment2 | moment2_lb | expectation | all")
      ->required()
      ->check(CLI::IsMember({"mse", "variance", "gradvar", "gradvar_sum", "moment2", "moment2_lb", "expectation", "all"}));
  orc->add_option("--circuit", oa.circuit, "circuit JSON file")->required();
  orc->add_option("--param", oa.param, "gradvar: a single parameter index");
  orc->add_option("--theta", oa.theta, "expectation: comma-separated grid indices 0..3");
  orc->add_option("--angles", oa.angles, "expectation: comma-separated angles in radians");
  orc->add_option("--max-points", oa.max_points, "largest grid that will be enumerated");
  orc->add_flag("--noiseless", oa.noiseless, "drop all noise sites");
  orc->add_option("--out", oa.out_dir, "output directory");

  GenArgs ga;
  auto* gen = app.add_subcommand("gen", "write a generated circuit file");
  gen->add_option("family", ga.family, "line | grid | ring")->required()->check(CLI::IsMember({"line", "grid", "ring"}));
  gen->add_option("--n", ga.n, "qubits (line, ring)");
  gen->add_option("--p", ga.p, "blocks (line)");
  gen->add_option("--rows", ga.rows, "grid rows");
  gen->add_option("--cols", ga.cols, "grid columns");
  gen->add_option("--blocks", ga.blocks, "blocks (grid, ring)");
  gen->add_option("--two-qubit", ga.two_qubit, "grid entangler: rzz | cz");
  gen->add_option("--noise", ga.noise, "KIND:key=value,... or none");
  gen->add_option("--noise-mode", ga.noise_mode, "gate | qubit");
  gen->add_option("--observable", ga.observable, "e.g. \"0.5*Z0 Z1 + X2\"");
  gen->add_option("--output", ga.output, "file to write (default stdout)");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*diag) return cmd_diagnose(da, args, out);
    if (*bench) return cmd_benchmark(ba, args, out);
    if (*plan) return cmd_plan(pa, args, out);
    if (*bott) return cmd_bottleneck(bka, args, out);
    if (*orc) return cmd_oracle(oa, args, out);
    if (*gen) return cmd_gen(ga, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}

}  // namespace obppp
