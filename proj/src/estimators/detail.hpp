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

// Shared plumbing for the estimator translation units.

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "obppp/engine.hpp"
#include "obppp/estimators.hpp"
#include "obppp/parallel.hpp"

namespace obppp::detail {

// Stream purpose tags. The angle tag is shared by every estimator so that
// runs with the same seed see the same angle samples.
enum Tag : uint64_t {
  kTagTheta = 0x5448,
  kTagTheta2,
  kTagMse,
  kTagVariance,
  kTagGrad,
  kTagSens,
  kTagFd,
  kTagHs,
  kTagLb,
};

// Source of outer angle samples: i.i.d. grid draws, or the whole grid in
// lexicographic order (digit j of the index is parameter j).
class OuterAngles {
 public:
  OuterAngles(const Circuit& c, const DiagnosticConfig& cfg);
  std::size_t count() const { return count_; }
  bool exhaustive() const { return exhaustive_; }
  Theta at(std::size_t i) const;

 private:
  std::size_t n_params_;
  uint64_t seed_;
  std::size_t count_;
  bool exhaustive_;
};

// Noisy <O>_theta for replicate stream `key`: exact when the circuit is
// deterministic or the config asks for exact mode, else the n_tau mean.
double noisy_value(const Engine& e, const ObservableSum& obs, const Theta& theta,
                   const DiagnosticConfig& cfg, uint64_t key);
// True when one evaluation already is the exact value, so replicate
// products collapse to squares.
bool single_replicate(const Engine& e, const DiagnosticConfig& cfg);
// Inner sample count to report: 1 for deterministic circuits, 0 for exact
// branch sums.
inline std::size_t reported_tau(const Engine& e, const DiagnosticConfig& cfg) {
  if (e.deterministic()) return 1;
  return cfg.mode == EvalMode::Exact ? 0 : cfg.n_tau;
}

class Stopwatch {
 public:
  Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

EstimateReport base_report(const std::string& quantity, const DiagnosticConfig& cfg,
                           std::size_t n_theta, std::size_t n_tau, std::size_t n_sigma,
                           bool exact);

// Runs f(i, acc) for every outer index and merges per-chunk accumulators in
// chunk order as soon as a contiguous prefix is done, so memory stays
// bounded by the number of chunks in flight. Acc needs merge(const Acc&).
template <class Acc, class F>
Acc run_outer(std::size_t total, const DiagnosticConfig& cfg, const Acc& proto, F&& f) {
  Acc out = proto;
  std::mutex mu;
  std::map<std::size_t, std::unique_ptr<Acc>> done;
  std::size_t next = 0;
  run_chunks(total, cfg.chunk, cfg.threads, [&](std::size_t c, std::size_t b, std::size_t e) {
    auto acc = std::make_unique<Acc>(proto);
    for (std::size_t i = b; i < e; ++i) f(i, *acc);
    std::lock_guard<std::mutex> lock(mu);
    done.emplace(c, std::move(acc));
    for (auto it = done.find(next); it != done.end(); it = done.find(next)) {
      out.merge(*it->second);
      done.erase(it);
      ++next;
    }
  });
  return out;
}

// Per-index moment accumulators with an implicit common count: indices not
// touched by a sample contribute 0.
struct SparseMoments {
  std::vector<KahanSum> sum, sum2;
  explicit SparseMoments(std::size_t k = 0) : sum(k), sum2(k) {}
  void add(std::size_t j, double v) {
    sum[j].add(v);
    sum2[j].add(v * v);
  }
  void merge(const SparseMoments& o) {
    for (std::size_t j = 0; j < sum.size(); ++j) {
      sum[j].merge(o.sum[j]);
      sum2[j].merge(o.sum2[j]);
    }
  }
  double mean(std::size_t j, std::size_t n) const { return sum[j].value() / static_cast<double>(n); }
  double stderr_mean(std::size_t j, std::size_t n) const;
};

// Unbiased estimate of (E X)^2 from i.i.d. draws: the average of X_a X_b
// over distinct pairs.
inline double pair_product_mean(double sum, double sum2, std::size_t n) {
  const double nn = static_cast<double>(n);
  return (sum * sum - sum2) / (nn * (nn - 1.0));
}

}  // namespace obppp::detail
