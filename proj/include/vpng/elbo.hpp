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

#ifndef VPNG_ELBO_HPP_
#define VPNG_ELBO_HPP_

#include <vector>

#include "vpng/family.hpp"
#include "vpng/layout.hpp"
#include "vpng/model.hpp"

namespace vpng {

// A minibatch view into the full dataset. `indices` are global row indices,
// which is what keys the per-datapoint noise: the same datapoint gets the
// same epsilon in the same iteration no matter how batches are cut.
struct Batch {
  const Eigen::MatrixXd* rows = nullptr;  // full data, n x data_dim
  std::vector<int> indices;
  int full_n = 0;

  int size() const { return static_cast<int>(indices.size()); }
  double scale() const { return static_cast<double>(full_n) / size(); }
  static Batch all(const Eigen::MatrixXd& data) {
    Batch b;
    b.rows = &data;
    b.full_n = static_cast<int>(data.rows());
    b.indices.resize(b.full_n);
    for (int i = 0; i < b.full_n; ++i) b.indices[i] = i;
    return b;
  }
};

// Seed metadata for one estimator call. Two calls with equal SeedCtx see
// identical noise; the stream separates consumers (training vs evaluation).
struct SeedCtx {
  std::uint64_t seed = 0;
  std::uint64_t iteration = 0;
  std::uint64_t stream = kElboNoiseStream;
};

struct ElboEstimate {
  double value = 0.0;
  ParamVector grad;  // empty unless the gradient was requested
  int mc_samples = 0;
  double beta = 1.0;
  std::vector<int> indices;
  double scale = 1.0;  // n / B
};

// Monte Carlo estimate of the beta-scaled ELBO
//   (n/B) (1/M) sum_{i in batch} sum_k log p(x_i | g(x_i, eps_ik; lambda); theta)
//   - beta * KL(q || p(z)),
// where the KL term is analytic: one term for a global latent, the
// batch-scaled sum over local latents otherwise.
ElboEstimate estimate_elbo(const Model& model, const VariationalProgram& program,
                           const Layout& layout, const ParamVector& eta,
                           const Batch& batch, int M, double beta,
                           const SeedCtx& ctx);

// Same estimator with the pathwise gradient over eta = (lambda, theta).
ElboEstimate grad_elbo(const Model& model, const VariationalProgram& program,
                       const Layout& layout, const ParamVector& eta,
                       const Batch& batch, int M, double beta,
                       const SeedCtx& ctx);

}  // namespace vpng

#endif  // VPNG_ELBO_HPP_
