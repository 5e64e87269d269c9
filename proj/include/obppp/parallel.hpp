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

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace obppp {

// Neumaier compensated sum.
class KahanSum {
 public:
  void add(double v) {
    const double t = s_ + v;
    if (std::fabs(s_) >= std::fabs(v)) {
      c_ += (s_ - t) + v;
    } else {
      c_ += (v - t) + s_;
    }
    s_ = t;
  }
  void merge(const KahanSum& o) {
    add(o.s_);
    add(o.c_);
  }
  double value() const { return s_ + c_; }

 private:
  double s_ = 0.0, c_ = 0.0;
};

// Running first and second moments of i.i.d. samples.
struct MomentAcc {
  KahanSum sum, sum2;
  std::size_t n = 0;

  void add(double v) {
    sum.add(v);
    sum2.add(v * v);
    ++n;
  }
  void merge(const MomentAcc& o) {
    sum.merge(o.sum);
    sum2.merge(o.sum2);
    n += o.n;
  }
  double mean() const { return n ? sum.value() / static_cast<double>(n) : 0.0; }
  // Unbiased sample variance.
  double variance() const;
  // Standard error of mean(); 0 for fewer than two samples.
  double stderr_mean() const;
};

// Paired moments for the delta method: sample covariance of (a, b).
struct CovAcc {
  MomentAcc a, b;
  KahanSum ab;

  void add(double x, double y) {
    a.add(x);
    b.add(y);
    ab.add(x * y);
  }
  void merge(const CovAcc& o) {
    a.merge(o.a);
    b.merge(o.b);
    ab.merge(o.ab);
  }
  double covariance() const;
};

// Number of workers to use when the caller passes 0: OBPPP_THREADS if set
// and valid, else std::thread::hardware_concurrency().
std::size_t default_thread_count();

// Runs body(chunk, begin, end) for every fixed-size chunk of [0, total).
// Chunks are handed to workers dynamically, but the partition does not
// depend on the worker count, so callers that store per-chunk results and
// merge them in chunk order get bit-identical output for any thread count.
// The first exception thrown by a body is rethrown after all workers stop.
void run_chunks(std::size_t total, std::size_t chunk, std::size_t threads,
                const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

inline std::size_t chunk_count(std::size_t total, std::size_t chunk) {
  return (total + chunk - 1) / chunk;
}

}  // namespace obppp
