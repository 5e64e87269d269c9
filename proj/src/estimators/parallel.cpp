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
#include "obppp/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "obppp/errors.hpp"

namespace obppp {

double MomentAcc::variance() const {
  if (n < 2) return 0.0;
  const double m = mean();
  const double nn = static_cast<double>(n);
  return std::max(0.0, (sum2.value() - nn * m * m) / (nn - 1.0));
}

double MomentAcc::stderr_mean() const {
  if (n < 2) return 0.0;
  return std::sqrt(variance() / static_cast<double>(n));
}

double CovAcc::covariance() const {
  const std::size_t n = a.n;
  if (n < 2) return 0.0;
  const double nn = static_cast<double>(n);
  return (ab.value() - nn * a.mean() * b.mean()) / (nn - 1.0);
}

std::size_t default_thread_count() {
  if (const char* env = std::getenv("OBPPP_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void run_chunks(std::size_t total, std::size_t chunk, std::size_t threads,
                const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
  if (chunk == 0) throw ValidationError("chunk size must be positive");
  const std::size_t n_chunks = chunk_count(total, chunk);
  if (n_chunks == 0) return;
  if (threads == 0) threads = default_thread_count();
  threads = std::min(threads, n_chunks);

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) return;
      const std::size_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      try {
        body(c, c * chunk, std::min(total, (c + 1) * chunk));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        failed = true;
        return;
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace obppp
