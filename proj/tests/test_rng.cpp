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

#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "vpng/rng.hpp"

using namespace vpng;

TEST_SUITE("rng") {

TEST_CASE("same key reproduces the same stream bit for bit") {
  NoiseKey key{7, kTestStream, 3, 11, 2};
  CounterRng a(key);
  CounterRng b(key);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  CounterRng c(key), d(key);
  for (int i = 0; i < 50; ++i) {
    CHECK(c.normal() == d.normal());
  }
}

TEST_CASE("changing any key field changes the stream") {
  const NoiseKey base{7, kTestStream, 3, 11, 2};
  std::vector<NoiseKey> variants = {
      {8, kTestStream, 3, 11, 2},  {7, kTestStream + 1, 3, 11, 2},
      {7, kTestStream, 4, 11, 2},  {7, kTestStream, 3, 12, 2},
      {7, kTestStream, 3, 11, 3},
  };
  CounterRng r0(base);
  const std::uint64_t first = r0.next_u64();
  for (const auto& k : variants) {
    CounterRng r(k);
    CHECK(r.next_u64() != first);
  }
}

TEST_CASE("uniform lies in [0,1) and uniform_pos in (0,1)") {
  CounterRng rng(NoiseKey{1, kTestStream, 0, 0, 0});
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double v = rng.uniform_pos();
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("uniform moments match a U(0,1) at MC accuracy") {
  CounterRng rng(NoiseKey{2, kTestStream, 0, 0, 0});
  const int n = 200000;
  double s = 0.0, ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    s += u;
    ss += u * u;
  }
  const double mean = s / n;
  const double var = ss / n - mean * mean;
  // se(mean) ~ sqrt(1/12/n) ~ 6.5e-4
  CHECK(std::abs(mean - 0.5) < 4e-3);
  CHECK(std::abs(var - 1.0 / 12.0) < 4e-3);
}

TEST_CASE("normal moments match N(0,1) at MC accuracy") {
  CounterRng rng(NoiseKey{3, kTestStream, 0, 0, 0});
  const int n = 200000;
  double s = 0.0, ss = 0.0, s3 = 0.0, s4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    ss += z * z;
    s3 += z * z * z;
    s4 += z * z * z * z;
  }
  const double mean = s / n;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(ss / n - 1.0) < 0.02);
  CHECK(std::abs(s3 / n) < 0.05);
  CHECK(std::abs(s4 / n - 3.0) < 0.15);
}

TEST_CASE("poisson mean and variance track the rate on both branches") {
  // inversion branch
  {
    CounterRng rng(NoiseKey{4, kTestStream, 0, 0, 0});
    const double rate = 3.5;
    const int n = 100000;
    double s = 0.0, ss = 0.0;
    for (int i = 0; i < n; ++i) {
      const double k = static_cast<double>(rng.poisson(rate));
      s += k;
      ss += k * k;
    }
    const double mean = s / n;
    CHECK(std::abs(mean - rate) < 0.05);
    CHECK(std::abs(ss / n - mean * mean - rate) < 0.2);
  }
  // large-rate branch
  {
    CounterRng rng(NoiseKey{5, kTestStream, 0, 0, 0});
    const double rate = 40.0;
    const int n = 100000;
    double s = 0.0, ss = 0.0;
    for (int i = 0; i < n; ++i) {
      const double k = static_cast<double>(rng.poisson(rate));
      s += k;
      ss += k * k;
    }
    const double mean = s / n;
    CHECK(std::abs(mean - rate) < 0.15);
    CHECK(std::abs(ss / n - mean * mean - rate) < 2.0);
  }
}

TEST_CASE("poisson with zero rate returns zero") {
  CounterRng rng(NoiseKey{6, kTestStream, 0, 0, 0});
  for (int i = 0; i < 10; ++i) CHECK(rng.poisson(0.0) == 0);
}

TEST_CASE("bernoulli_logit frequency matches the sigmoid") {
  CounterRng rng(NoiseKey{7, kTestStream, 0, 0, 0});
  const double logit = 0.8;
  const double p = 1.0 / (1.0 + std::exp(-logit));
  const int n = 100000;
  int ones = 0;
  for (int i = 0; i < n; ++i) ones += rng.bernoulli_logit(logit);
  CHECK(std::abs(static_cast<double>(ones) / n - p) < 0.006);

  CounterRng rng2(NoiseKey{8, kTestStream, 0, 0, 0});
  for (int i = 0; i < 20; ++i) {
    CHECK(rng2.bernoulli_logit(40.0) == 1);
    CHECK(rng2.bernoulli_logit(-40.0) == 0);
  }
}

TEST_CASE("NoiseDraw::regenerate reproduces the values bit for bit") {
  NoiseDraw d = NoiseDraw::make(NoiseKey{9, kTestStream, 5, 2, 1}, 17);
  NoiseDraw e = d.regenerate();
  REQUIRE(e.values.size() == d.values.size());
  for (int i = 0; i < 17; ++i) CHECK(e.values[i] == d.values[i]);
}

TEST_CASE("derive spreads nearby keys over distinct states") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 10; ++s)
    for (std::uint64_t i = 0; i < 10; ++i)
      for (std::uint64_t a = 0; a < 10; ++a)
        seen.insert(CounterRng::derive(NoiseKey{s, kTestStream, i, a, 0}));
  CHECK(seen.size() == 1000);
}

}  // TEST_SUITE
