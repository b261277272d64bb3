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

#ifndef VPNG_OPTIM_HPP_
#define VPNG_OPTIM_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "vpng/elbo.hpp"
#include "vpng/fisher.hpp"
#include "vpng/kfac.hpp"
#include "vpng/problem.hpp"

namespace vpng {

enum class Method { kGrad, kNg, kVpng };
enum class Backend { kDense, kKfac };
enum class Adapter { kNone, kRmsprop, kAdam };

struct TrainConfig {
  Method method = Method::kGrad;
  Backend curvature_backend = Backend::kDense;
  double step_size = 0.01;
  Adapter adapter = Adapter::kNone;
  double decay = 0.9;       // rmsprop
  double beta1 = 0.9;       // adam
  double beta2 = 0.999;     // adam
  double eps_stab = 1e-8;
  int M = 10;
  double mu = -1.0;         // < 0: pick 0.1 * tr(F)/dim at the first step
  double beta = 1.0;        // KL scale
  int batch_size = 0;       // 0: full batch
  int max_iters = 1000;
  double time_budget_s = 0.0;  // 0: no budget
  int eval_every = 100;
  std::uint64_t seed = 0;
  double K = 8.0;           // kfac low-rank retention constant
  double rho = 0.95;        // kfac EMA decay
  int lowrank_dim_threshold = 128;
};

void validate(const TrainConfig& config);

struct OptimState {
  ParamVector eta;
  Eigen::VectorXd m1;  // adam first moments
  Eigen::VectorXd m2;  // rmsprop/adam second moments
  int iteration = 0;
  double mu_used = -1.0;  // resolved dampening; < 0 until the first vpng/ng step
  double last_value = 0.0;
  NetworkView view;                 // kfac backend only
  std::unique_ptr<KfacState> kfac;  // kfac backend only
};

OptimState init_state(const Problem& problem, const TrainConfig& config,
                      int full_n);

// test hook: inject a fixed curvature matrix in place of the MC estimate
struct StepHooks {
  const SymMatrix* fisher_override = nullptr;
};

// One ascent step of Algorithm-style training: ELBO gradient, method
// direction, adapter scaling, eta update. Throws NonFiniteParameter when the
// update leaves the finite range.
void step(OptimState& state, const TrainConfig& config, const Problem& problem,
          const Batch& batch, const StepHooks* hooks = nullptr);

// The adapter's per-coordinate rescaling of a direction; t is the 1-based
// step count for bias correction. Updates the moment accumulators in place.
Eigen::VectorXd adapter_scale(Eigen::VectorXd& m1, Eigen::VectorXd& m2, int t,
                              const Eigen::VectorXd& direction,
                              const TrainConfig& config);

// Uniform without-replacement minibatch, keyed by (seed, iteration).
Batch sample_batch(const Eigen::MatrixXd& data, int batch_size,
                   std::uint64_t seed, std::uint64_t iteration);

struct GridResult {
  int best_index = -1;
  std::vector<double> metrics;  // NaN marks a diverged run
};

// Runs the metric functional per config and picks the argmax of the final
// train metric; ties go to the smaller step_size. Throws AllRunsDiverged
// when nothing finishes finite.
GridResult grid_search(
    const std::vector<TrainConfig>& configs,
    const std::function<double(const TrainConfig&)>& final_train_metric);

}  // namespace vpng

#endif  // VPNG_OPTIM_HPP_
