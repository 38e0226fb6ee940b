// Copyright 2026 The adaptive-vmc Authors
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

#ifndef AVMC_RNG_HPP_
#define AVMC_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>

namespace avmc {

// All randomness in a run is derived from one master seed through
// splitmix64, so that independent components (policy init, sampling,
// each environment, minibatch shuffling) own disjoint streams and
// enabling/disabling one component never shifts another's stream.
inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Stream ids used across the project. Fixed so that runs are reproducible
// from (master seed, stream, index) alone.
enum class Stream : uint64_t {
  kPolicyInit = 1,
  kValueInit = 2,
  kLyapunovInit = 3,
  kActionSampling = 4,
  kMinibatchShuffle = 5,
  kEnvironment = 6,   // index = environment id
  kEvaluation = 7,
  kSweep = 8,
};

inline uint64_t derive_seed(uint64_t master, Stream stream, uint64_t index = 0) {
  uint64_t s = master;
  (void)splitmix64(s);
  s ^= static_cast<uint64_t>(stream) * 0xD6E8FEB86659FD93ULL;
  (void)splitmix64(s);
  s ^= index * 0xCA5A826395121157ULL;
  return splitmix64(s);
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Box-Muller; avoids std::normal_distribution so that sampled values do
  // not depend on the standard library implementation.
  double normal() {
    double u1 = 1.0 - uniform01();  // (0, 1]
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace avmc

#endif  // AVMC_RNG_HPP_
