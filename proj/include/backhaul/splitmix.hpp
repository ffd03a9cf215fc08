// Copyright 2026 The Backhaul Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// SplitMix64, bit-exact with the reference algorithm so that corpora are
// reproducible from seeds alone in any language.

#ifndef BACKHAUL_SPLITMIX_HPP_
#define BACKHAUL_SPLITMIX_HPP_

#include <cstdint>

namespace backhaul {

inline constexpr uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(uint64_t seed) : state_(seed) {}

  constexpr uint64_t next() {
    uint64_t z = (state_ += kGoldenGamma);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on [lo, hi] by rejection, so no modulo bias.
  constexpr int64_t uniform(int64_t lo, int64_t hi) {
    const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<int64_t>(next());
    const uint64_t rem = (UINT64_MAX % span + 1) % span;  // 2^64 mod span
    uint64_t r = next();
    while (rem != 0 && r > UINT64_MAX - rem) r = next();
    return lo + static_cast<int64_t>(r % span);
  }

 private:
  uint64_t state_;
};

}  // namespace backhaul

#endif  // BACKHAUL_SPLITMIX_HPP_
