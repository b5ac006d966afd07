// Copyright 2026 The tomoplan Authors
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

#pragma once

#include <cstdint>
#include <random>

namespace tomoplan {

/// Seeded 64-bit Mersenne Twister with portable uniform draws. The engine's
/// output sequence is fixed by the standard; uniform() uses the top 53 bits
/// so the stream is identical on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32)};
    engine_.seed(seq);
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller (one value per call).
  double normal();

  /// Exp(1).
  double exponential();

 private:
  std::mt19937_64 engine_;
};

/// Seed of stream `index` derived from `base` (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace tomoplan
