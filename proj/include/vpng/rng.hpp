// Copyright 2026 The VPNG Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Counter-based RNG. Every logical sample (one noise vector, one predictive
// draw, ...) owns a key derived from (seed, stream, iteration, unit ids), so
// samples can be generated in any order, on any thread, and regenerated
// bit-exactly from their key alone.

#ifndef VPNG_RNG_HPP_
#define VPNG_RNG_HPP_

#include <cstdint>

#include <Eigen/Dense>

namespace vpng {

// Stream ids keep unrelated consumers of the same (seed, iteration) apart.
enum Stream : std::uint64_t {
  kInitStream = 1,
  kDataGenStream = 2,
  kBatchStream = 3,
  kElboNoiseStream = 4,
  kPredNoiseStream = 5,
  kPredDrawStream = 6,
  kEvalNoiseStream = 7,
  kRefitStream = 8,
  kTestStream = 100,  // unit tests and oracles start here
};

struct NoiseKey {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::uint64_t iteration = 0;
  std::uint64_t unit_a = 0;  // usually the global datapoint index
  std::uint64_t unit_b = 0;  // usually the MC sample index

  bool operator==(const NoiseKey&) const = default;
};

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class CounterRng {
 public:
  explicit CounterRng(const NoiseKey& key) : base_(derive(key)) {}
  explicit CounterRng(std::uint64_t seed) : base_(mix64(seed + kGamma)) {}

  std::uint64_t next_u64() { return mix64(base_ + (++counter_) * kGamma); }

  // uniform in [0, 1), 53 bits
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }
  // uniform in (0, 1), safe for logs
  double uniform_pos() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal();                    // Box-Muller, 2 uniforms per call
  long poisson(double rate);          // inversion below 10, PTRS above
  int bernoulli_logit(double logit);  // 1 with prob sigmoid(logit)

  void fill_normal(Eigen::Ref<Eigen::VectorXd> out) {
    for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = normal();
  }

  static std::uint64_t derive(const NoiseKey& key);

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
  std::uint64_t base_ = 0;
  std::uint64_t counter_ = 0;
};

// One reparameterization noise vector together with the key that made it.
// regenerate() must reproduce `values` bit-exactly.
struct NoiseDraw {
  Eigen::VectorXd values;
  NoiseKey key;

  static NoiseDraw make(const NoiseKey& key, int dim) {
    NoiseDraw d;
    d.key = key;
    d.values.resize(dim);
    CounterRng rng(key);
    rng.fill_normal(d.values);
    return d;
  }
  NoiseDraw regenerate() const {
    return make(key, static_cast<int>(values.size()));
  }
};

}  // namespace vpng

#endif  // VPNG_RNG_HPP_
