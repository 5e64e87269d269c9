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

#include <array>
#include <cstdint>
#include <initializer_list>

namespace obppp {

// Philox4x32-10 (Salmon et al., SC'11). Pure function of (counter, key).
inline std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> ctr, std::array<uint32_t, 2> key) {
  constexpr uint32_t kM0 = 0xD2511F53, kM1 = 0xCD9E8D57;
  constexpr uint32_t kW0 = 0x9E3779B9, kW1 = 0xBB67AE85;
  for (int round = 0; round < 10; ++round) {
    const uint64_t p0 = uint64_t{kM0} * ctr[0];
    const uint64_t p1 = uint64_t{kM1} * ctr[2];
    ctr = {static_cast<uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<uint32_t>(p1),
           static_cast<uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<uint32_t>(p0)};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Folds a tuple of indices (purpose tag, sample index, replicate, ...) into
// a stream id. Distinct tuples collide with probability ~2^-64.
inline uint64_t stream_key(std::initializer_list<uint64_t> parts) {
  uint64_t h = 0x243F6A8885A308D3ull;
  for (uint64_t p : parts) h = splitmix64(h ^ splitmix64(p + 0x13198A2E03707344ull));
  return h;
}

// Counter-based stream: draw j of stream s under seed k is
// philox(counter = (s, j / 2), key = k). Nothing here depends on which
// thread does the drawing.
class RngStream {
 public:
  RngStream(uint64_t seed, uint64_t stream_id) : seed_(seed), stream_(stream_id) {}

  uint64_t next_u64() {
    if (avail_ == 0) refill();
    --avail_;
    return buf_[avail_];
  }
  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  uint64_t blocks_drawn() const { return block_; }

 private:
  void refill() {
    const auto r = philox4x32(
        {static_cast<uint32_t>(stream_), static_cast<uint32_t>(stream_ >> 32),
         static_cast<uint32_t>(block_), static_cast<uint32_t>(block_ >> 32)},
        {static_cast<uint32_t>(seed_), static_cast<uint32_t>(seed_ >> 32)});
    ++block_;
    buf_[1] = (uint64_t{r[0]} << 32) | r[1];
    buf_[0] = (uint64_t{r[2]} << 32) | r[3];
    avail_ = 2;
  }

  uint64_t seed_, stream_;
  uint64_t block_ = 0;
  uint64_t buf_[2] = {0, 0};
  int avail_ = 0;
};

}  // namespace obppp
