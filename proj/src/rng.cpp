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

#include "vpng/rng.hpp"

#include <cmath>

#include "vpng/errors.hpp"

namespace vpng {

std::uint64_t CounterRng::derive(const NoiseKey& key) {
  // chain the key fields through the finalizer; +1 keeps field value 0 alive
  std::uint64_t s = mix64(key.seed + kGamma);
  s = mix64(s + kGamma * (key.stream + 1));
  s = mix64(s + kGamma * (key.iteration + 1));
  s = mix64(s + kGamma * (key.unit_a + 1));
  s = mix64(s + kGamma * (key.unit_b + 1));
  return s;
}

double CounterRng::normal() {
  // Box-Muller, cosine branch only. Two uniforms per normal keeps the
  // counter consumption fixed, which is what we care about here.
  const double u1 = uniform_pos();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

int CounterRng::bernoulli_logit(double logit) {
  // p = sigmoid(logit), evaluated without overflow
  const double p = logit >= 0.0 ? 1.0 / (1.0 + std::exp(-logit))
                                : std::exp(logit) / (1.0 + std::exp(logit));
  return uniform() < p ? 1 : 0;
}

namespace {

// sequential-search inversion; fine for small rates
long poisson_inversion(CounterRng& rng, double rate) {
  const double u = rng.uniform();
  double p = std::exp(-rate);
  double cdf = p;
  long k = 0;
  while (u > cdf) {
    ++k;
    p *= rate / static_cast<double>(k);
    cdf += p;
    if (k > 2000) break;  // cdf underflow guard; unreachable for rate < 10
  }
  return k;
}

// Hormann's PTRS transformed rejection; exact and O(1) for large rates
long poisson_ptrs(CounterRng& rng, double rate) {
  const double slam = std::sqrt(rate);
  const double loglam = std::log(rate);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);

  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform_pos();
    const double us = 0.5 - std::abs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + rate + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<long>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    const long k = static_cast<long>(kf);
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        -rate + kf * loglam - std::lgamma(kf + 1.0)) {
      return k;
    }
  }
}

}  // namespace

long CounterRng::poisson(double rate) {
  if (!(rate >= 0.0) || !std::isfinite(rate))
    throw NonFiniteLikelihood("poisson rate must be finite and >= 0");
  if (rate == 0.0) return 0;
  if (rate < 10.0) return poisson_inversion(*this, rate);
  return poisson_ptrs(*this, rate);
}

}  // namespace vpng
