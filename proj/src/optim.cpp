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

#include "vpng/optim.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "vpng/errors.hpp"

namespace vpng {

void validate(const TrainConfig& config) {
  require(config.step_size > 0.0, "TrainConfig: step_size must be > 0");
  require(config.M >= 1, "TrainConfig: M must be >= 1");
  require(config.beta >= 0.0 && config.beta <= 1.0,
          "TrainConfig: beta must be in [0, 1]");
  require(config.batch_size >= 0, "TrainConfig: batch_size must be >= 0");
  require(config.max_iters >= 1, "TrainConfig: max_iters must be >= 1");
  require(config.time_budget_s >= 0.0, "TrainConfig: time budget must be >= 0");
  require(config.eval_every >= 1, "TrainConfig: eval_every must be >= 1");
  require(config.decay > 0.0 && config.decay < 1.0,
          "TrainConfig: decay must be in (0, 1)");
  require(config.beta1 >= 0.0 && config.beta1 < 1.0,
          "TrainConfig: beta1 must be in [0, 1)");
  require(config.beta2 > 0.0 && config.beta2 < 1.0,
          "TrainConfig: beta2 must be in (0, 1)");
  require(config.eps_stab > 0.0, "TrainConfig: eps_stab must be > 0");
  require(config.K > 0.0, "TrainConfig: K must be > 0");
  require(config.rho >= 0.0 && config.rho < 1.0,
          "TrainConfig: rho must be in [0, 1)");
  require(config.lowrank_dim_threshold >= 1,
          "TrainConfig: lowrank_dim_threshold must be >= 1");
  // mu < 0 means automatic; any non-negative value is taken literally
}

OptimState init_state(const Problem& problem, const TrainConfig& config,
                      int full_n) {
  validate(config);
  require(full_n >= 1, "init_state: dataset size must be >= 1");
  OptimState state;
  state.eta = problem.init_eta(config.seed);
  state.m1 = Eigen::VectorXd::Zero(problem.layout.dim());
  state.m2 = Eigen::VectorXd::Zero(problem.layout.dim());
  state.mu_used = config.mu;
  if (config.method == Method::kVpng &&
      config.curvature_backend == Backend::kKfac) {
    state.view = stacked_network_view(*problem.model, *problem.program,
                                      problem.layout);
    state.kfac = std::make_unique<KfacState>(
        state.view, config.rho, config.K, config.lowrank_dim_threshold,
        static_cast<double>(full_n));
  }
  return state;
}

Eigen::VectorXd adapter_scale(Eigen::VectorXd& m1, Eigen::VectorXd& m2, int t,
                              const Eigen::VectorXd& direction,
                              const TrainConfig& config) {
  require(t >= 1, "adapter_scale: t is 1-based");
  switch (config.adapter) {
    case Adapter::kNone:
      return direction;
    case Adapter::kRmsprop: {
      require(m2.size() == direction.size(), "adapter_scale: dim mismatch");
      m2 = config.decay * m2.array() +
           (1.0 - config.decay) * direction.array().square();
      return direction.array() / (m2.array() + config.eps_stab).sqrt();
    }
    case Adapter::kAdam: {
      require(m1.size() == direction.size() && m2.size() == direction.size(),
              "adapter_scale: dim mismatch");
      m1 = config.beta1 * m1 + (1.0 - config.beta1) * direction;
      m2 = config.beta2 * m2.array() +
           (1.0 - config.beta2) * direction.array().square();
      const double c1 = 1.0 - std::pow(config.beta1, t);
      const double c2 = 1.0 - std::pow(config.beta2, t);
      return (m1.array() / c1) /
             ((m2.array() / c2).sqrt() + config.eps_stab);
    }
  }
  throw Error("adapter_scale: unknown adapter");
}

Batch sample_batch(const Eigen::MatrixXd& data, int batch_size,
                   std::uint64_t seed, std::uint64_t iteration) {
  const int n = static_cast<int>(data.rows());
  require(n >= 1, "sample_batch: empty dataset");
  if (batch_size <= 0 || batch_size >= n) return Batch::all(data);

  // partial Fisher-Yates over the index range
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  CounterRng rng({seed, kBatchStream, iteration, 0, 0});
  Batch batch;
  batch.rows = &data;
  batch.full_n = n;
  batch.indices.resize(batch_size);
  for (int i = 0; i < batch_size; ++i) {
    const int j = i + static_cast<int>(rng.uniform() * (n - i));
    std::swap(pool[i], pool[j]);
    batch.indices[i] = pool[i];
  }
  return batch;
}

namespace {

double resolve_mu(const TrainConfig& config, double trace_over_dim) {
  if (config.mu >= 0.0) return config.mu;
  return 0.1 * trace_over_dim;
}

}  // namespace

namespace {

// A likelihood or gradient overflowing mid-step means the iterate has left
// the region where the objective is finite; callers treat that the same as
// the parameters themselves going non-finite.
[[noreturn]] void rethrow_as_diverged(const Error& e, int iteration) {
  throw NonFiniteParameter("step: diverged at iteration " +
                           std::to_string(iteration) + " (" + e.what() + ")");
}

}  // namespace

void step(OptimState& state, const TrainConfig& config, const Problem& problem,
          const Batch& batch, const StepHooks* hooks) {
  const Model& model = *problem.model;
  const VariationalProgram& program = *problem.program;
  const Layout& layout = problem.layout;
  const auto it = static_cast<std::uint64_t>(state.iteration);

  const SeedCtx elbo_ctx{config.seed, it, kElboNoiseStream};
  ElboEstimate est;
  try {
    est = grad_elbo(model, program, layout, state.eta, batch, config.M,
                    config.beta, elbo_ctx);
  } catch (const NonFiniteLikelihood& e) {
    rethrow_as_diverged(e, state.iteration);
  } catch (const NonFiniteGradient& e) {
    rethrow_as_diverged(e, state.iteration);
  }
  state.last_value = est.value;

  Eigen::VectorXd direction;
  try {
    switch (config.method) {
      case Method::kGrad:
        direction = est.grad;
        break;
      case Method::kNg: {
        if (state.mu_used < 0.0) {
          Eigen::VectorXd diag;
          if (!program.q_fisher_diag(layout.lambda(state.eta), diag))
            throw NotSupported("step: ng needs a diagonal family Fisher");
          state.mu_used = resolve_mu(config, diag.sum() / layout.dim());
        }
        direction = q_natural_direction(program, layout, state.eta,
                                        state.mu_used, est.grad);
        break;
      }
      case Method::kVpng: {
        const SeedCtx pred_ctx{config.seed, it, kPredNoiseStream};
        if (hooks != nullptr && hooks->fisher_override != nullptr) {
          const FisherEstimate fe{*hooks->fisher_override, config.M,
                                  batch.scale(), batch.indices,
                                  FisherKind::kVpng};
          if (state.mu_used < 0.0)
            state.mu_used = resolve_mu(
                config, fe.matrix.dense().trace() / layout.dim());
          direction = vpng_direction(fe, state.mu_used, est.grad);
          break;
        }
        const PredictiveBatch pred = sample_predictive_batch(
            model, program, layout, state.eta, batch, config.M, pred_ctx);
        if (config.curvature_backend == Backend::kDense) {
          const FisherEstimate fe =
              estimate_vpng_fisher(model, program, layout, state.eta, pred);
          if (state.mu_used < 0.0)
            state.mu_used = resolve_mu(
                config, fe.matrix.dense().trace() / layout.dim());
          direction = vpng_direction(fe, state.mu_used, est.grad);
        } else {
          const std::vector<LayerRecord> records = collect_predictive_records(
              model, program, layout, state.eta, pred, state.view);
          state.kfac->update_factors(records, pred.size() * pred.mc_samples);
          if (state.mu_used < 0.0)
            state.mu_used = resolve_mu(
                config, kfac_mean_curvature(*state.kfac, layout.dim()));
          direction = kfac_direction(*state.kfac, state.view, state.mu_used,
                                     est.grad);
        }
        break;
      }
    }
  } catch (const NonFiniteLikelihood& e) {
    rethrow_as_diverged(e, state.iteration);
  } catch (const NonFiniteGradient& e) {
    rethrow_as_diverged(e, state.iteration);
  }

  const Eigen::VectorXd scaled =
      adapter_scale(state.m1, state.m2, state.iteration + 1, direction, config);
  state.eta += config.step_size * scaled;
  ++state.iteration;
  if (!state.eta.allFinite())
    throw NonFiniteParameter("step: parameters left the finite range at iteration " +
                             std::to_string(state.iteration));
}

GridResult grid_search(
    const std::vector<TrainConfig>& configs,
    const std::function<double(const TrainConfig&)>& final_train_metric) {
  require(!configs.empty(), "grid_search: empty grid");
  GridResult result;
  result.metrics.reserve(configs.size());
  for (const TrainConfig& c : configs) {
    double m;
    try {
      m = final_train_metric(c);
    } catch (const NonFiniteParameter&) {
      m = std::numeric_limits<double>::quiet_NaN();
    }
    result.metrics.push_back(m);
  }
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const double m = result.metrics[i];
    if (std::isnan(m)) continue;
    if (result.best_index < 0 || m > result.metrics[result.best_index] ||
        (m == result.metrics[result.best_index] &&
         configs[i].step_size < configs[result.best_index].step_size)) {
      result.best_index = static_cast<int>(i);
    }
  }
  if (result.best_index < 0)
    throw AllRunsDiverged("grid_search: every run diverged");
  return result;
}

}  // namespace vpng
