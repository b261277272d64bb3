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

#include "vpng/elbo.hpp"

#include <cmath>

#include "vpng/errors.hpp"
#include "vpng/parallel.hpp"

namespace vpng {
namespace {

using RowMajorXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_batch(const Batch& batch, const Model& model) {
  require(batch.rows != nullptr, "elbo: batch has no data");
  require(!batch.indices.empty(), "elbo: batch is empty");
  require(batch.rows->cols() == model.data_dim(),
          "elbo: data width does not match the model");
  require(batch.full_n >= 1, "elbo: full_n must be positive");
  for (int gi : batch.indices)
    require(gi >= 0 && gi < batch.rows->rows(), "elbo: batch index out of range");
}

ElboEstimate estimate_impl(const Model& model, const VariationalProgram& program,
                           const Layout& layout, const ParamVector& eta,
                           const Batch& batch, int M, double beta,
                           const SeedCtx& ctx, bool want_grad) {
  require(M >= 1, "elbo: M must be >= 1");
  require(beta >= 0.0 && beta <= 1.0, "elbo: beta must lie in [0, 1]");
  check_batch(batch, model);

  const int B = batch.size();
  const int D = layout.dim();
  const int L = layout.lambda_dim();
  const int zd = model.latent_dim();
  const double scale = batch.scale();
  const auto lambda = layout.lambda(eta);
  const auto theta = layout.theta(eta);

  // one slab row per (datapoint, sample) term, folded deterministically
  Eigen::VectorXd ll(static_cast<Eigen::Index>(B) * M);
  RowMajorXd gll;
  if (want_grad) gll.setZero(static_cast<Eigen::Index>(B) * M, D);

  ErrorCollector errs;
  parallel_for(static_cast<std::int64_t>(B) * M, [&](std::int64_t term) {
    errs.run([&] {
      const int i = static_cast<int>(term / M);
      const int k = static_cast<int>(term % M);
      const int gi = batch.indices[i];
      const Eigen::VectorXd x = batch.rows->row(gi);
      const NoiseDraw eps =
          NoiseDraw::make({ctx.seed, ctx.stream, ctx.iteration,
                           static_cast<std::uint64_t>(gi),
                           static_cast<std::uint64_t>(k)},
                          zd);
      const MeanFieldGaussian q = program.local(x, gi, lambda);
      const Eigen::VectorXd z = reparameterize(q, eps);

      Model::Ws ws;
      Eigen::VectorXd t(model.out_dim());
      model.conditional(x, z, theta, t, &ws);
      ll[term] = model.out_loglik(x, t);

      if (want_grad) {
        Eigen::VectorXd dt(model.out_dim());
        model.out_dloglik(x, t, dt);
        Eigen::VectorXd gz = Eigen::VectorXd::Zero(zd);
        Eigen::Map<Eigen::VectorXd> row(gll.data() + term * D, D);
        model.backprop(x, z, theta, &ws, dt, gz, row.segment(L, D - L), nullptr);
        program.pullback(x, gi, lambda, eps.values, gz, row.head(L), nullptr);
      }
    });
  });
  errs.rethrow();

  // analytic KL: per-datapoint and batch-scaled for local latents, a single
  // term for a global latent
  double kl_total = 0.0;
  double kl_scale = 1.0;
  Eigen::VectorXd kl_grad;
  if (program.local_latents()) {
    Eigen::VectorXd kvals(B);
    RowMajorXd kgrads;
    if (want_grad) kgrads.setZero(B, L);
    ErrorCollector kerrs;
    parallel_for(B, [&](std::int64_t i) {
      kerrs.run([&] {
        const int gi = batch.indices[i];
        const Eigen::VectorXd x = batch.rows->row(gi);
        if (want_grad) {
          Eigen::Map<Eigen::VectorXd> row(kgrads.data() + i * L, L);
          kvals[i] = program.kl_to_prior(x, gi, lambda, model.prior_sigma(), 1.0, row);
        } else {
          Eigen::VectorXd unused = Eigen::VectorXd::Zero(L);
          kvals[i] = program.kl_to_prior(x, gi, lambda, model.prior_sigma(), 0.0, unused);
        }
      });
    });
    kerrs.rethrow();
    kl_total = tree_fold(kvals, true);
    kl_scale = scale;
    if (want_grad) {
      tree_fold_rows(kgrads, true);
      kl_grad = kgrads.row(0);
    }
  } else {
    kl_grad = Eigen::VectorXd::Zero(L);
    const Eigen::VectorXd x0 = batch.rows->row(batch.indices[0]);
    kl_total = program.kl_to_prior(x0, batch.indices[0], lambda,
                                   model.prior_sigma(), want_grad ? 1.0 : 0.0,
                                   kl_grad);
  }

  ElboEstimate est;
  est.mc_samples = M;
  est.beta = beta;
  est.indices = batch.indices;
  est.scale = scale;

  const double sum_ll = tree_fold(ll, true);
  est.value = (scale / M) * sum_ll - beta * kl_scale * kl_total;
  if (!std::isfinite(est.value))
    throw NonFiniteLikelihood("elbo: estimate is not finite");

  if (want_grad) {
    tree_fold_rows(gll, true);
    est.grad = (scale / M) * gll.row(0).transpose();
    est.grad.head(L) -= (beta * kl_scale) * kl_grad;
    if (!est.grad.allFinite())
      throw NonFiniteGradient("elbo: gradient is not finite");
  }
  return est;
}

}  // namespace

ElboEstimate estimate_elbo(const Model& model, const VariationalProgram& program,
                           const Layout& layout, const ParamVector& eta,
                           const Batch& batch, int M, double beta,
                           const SeedCtx& ctx) {
  return estimate_impl(model, program, layout, eta, batch, M, beta, ctx, false);
}

ElboEstimate grad_elbo(const Model& model, const VariationalProgram& program,
                       const Layout& layout, const ParamVector& eta,
                       const Batch& batch, int M, double beta,
                       const SeedCtx& ctx) {
  return estimate_impl(model, program, layout, eta, batch, M, beta, ctx, true);
}

}  // namespace vpng
