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

#include "vpng/fisher.hpp"

#include <cmath>

#include "vpng/errors.hpp"
#include "vpng/parallel.hpp"

namespace vpng {
namespace {

using RowMajorXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_batch(const Batch& batch, const Model& model) {
  require(batch.rows != nullptr, "fisher: batch has no data");
  require(!batch.indices.empty(), "fisher: batch is empty");
  require(batch.rows->cols() == model.data_dim(),
          "fisher: data width does not match the model");
  for (int gi : batch.indices)
    require(gi >= 0 && gi < batch.rows->rows(),
            "fisher: batch index out of range");
}

// symmetric square root of a small PSD matrix (head Fishers)
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& F) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(F);
  require(es.info() == Eigen::Success, "fisher: head Fisher eigensolve failed");
  Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

PredictiveBatch sample_predictive_batch(const Model& model,
                                        const VariationalProgram& program,
                                        const Layout& layout,
                                        const ParamVector& eta,
                                        const Batch& batch, int M,
                                        const SeedCtx& ctx) {
  require(M >= 1, "fisher: M must be >= 1");
  check_batch(batch, model);

  const int B = batch.size();
  const int zd = model.latent_dim();
  const auto lambda = layout.lambda(eta);
  const auto theta = layout.theta(eta);

  PredictiveBatch pred;
  pred.rows = batch.rows;
  pred.indices = batch.indices;
  pred.full_n = batch.full_n;
  pred.mc_samples = M;
  pred.eps.resize(B);
  pred.zhat.resize(B);
  pred.xprime.resize(B);

  ErrorCollector errs;
  parallel_for(B, [&](std::int64_t i) {
    errs.run([&] {
      const int gi = batch.indices[i];
      const Eigen::VectorXd x = batch.rows->row(gi);
      const NoiseDraw eps = NoiseDraw::make(
          {ctx.seed, kPredNoiseStream, ctx.iteration,
           static_cast<std::uint64_t>(gi), 0},
          zd);
      const MeanFieldGaussian q = program.local(x, gi, lambda);
      const Eigen::VectorXd z = reparameterize(q, eps);
      pred.eps[i] = eps.values;
      pred.zhat[i] = z;

      Eigen::MatrixXd xp(M, model.data_dim());
      for (int k = 0; k < M; ++k) {
        // one sub-stream per draw: samplers may consume variable amounts
        CounterRng rng({ctx.seed, kPredDrawStream, ctx.iteration,
                        static_cast<std::uint64_t>(gi),
                        static_cast<std::uint64_t>(k)});
        xp.row(k) = model.sample_predictive(x, z, theta, rng);
      }
      pred.xprime[i] = std::move(xp);
    });
  });
  errs.rethrow();
  return pred;
}

FisherEstimate estimate_vpng_fisher(const Model& model,
                                    const VariationalProgram& program,
                                    const Layout& layout,
                                    const ParamVector& eta,
                                    const PredictiveBatch& pred) {
  require(pred.size() > 0 && pred.mc_samples >= 1, "fisher: empty predictive batch");
  const int B = pred.size();
  const int M = pred.mc_samples;
  const int D = layout.dim();
  const int L = layout.lambda_dim();
  const int zd = model.latent_dim();
  const auto lambda = layout.lambda(eta);
  const auto theta = layout.theta(eta);

  // per-(i, k) score rows; column-major so the gram dots are contiguous
  Eigen::MatrixXd slab = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(B) * M, D);

  ErrorCollector errs;
  parallel_for(B, [&](std::int64_t i) {
    errs.run([&] {
      const int gi = pred.indices[i];
      const Eigen::VectorXd x = pred.rows->row(gi);
      const Eigen::VectorXd& z = pred.zhat[i];

      // the conditional parameters depend on (x-context, z, theta) only, so
      // one forward pass serves all M resampled points
      Model::Ws ws;
      Eigen::VectorXd t(model.out_dim());
      model.conditional(x, z, theta, t, &ws);

      Eigen::VectorXd dt(model.out_dim());
      Eigen::VectorXd gz(zd);
      Eigen::VectorXd b(D);
      for (int k = 0; k < M; ++k) {
        const Eigen::VectorXd xp = pred.xprime[i].row(k);
        model.out_dloglik(xp, t, dt);
        gz.setZero();
        b.setZero();
        model.backprop(x, z, theta, &ws, dt, gz, b.segment(L, D - L), nullptr);
        program.pullback(x, gi, lambda, pred.eps[i], gz, b.head(L), nullptr);
        slab.row(i * M + k) = b;
      }
    });
  });
  errs.rethrow();

  if (!slab.allFinite())
    throw NonFiniteGradient("fisher: predictive score is not finite");

  const Eigen::MatrixXd F = gram_weighted(slab, pred.scale() / M, true);
  return FisherEstimate{SymMatrix(F), M, pred.scale(), pred.indices,
                        FisherKind::kVpng};
}

FisherEstimate exact_predictive_fisher(const Model& model,
                                       const VariationalProgram& program,
                                       const Layout& layout,
                                       const ParamVector& eta,
                                       const Batch& batch,
                                       const SeedCtx& ctx) {
  check_batch(batch, model);
  const int B = batch.size();
  const int D = layout.dim();
  const int L = layout.lambda_dim();
  const int od = model.out_dim();
  const int zd = model.latent_dim();
  const auto lambda = layout.lambda(eta);
  const auto theta = layout.theta(eta);

  Eigen::MatrixXd slab = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(B) * od, D);

  ErrorCollector errs;
  parallel_for(B, [&](std::int64_t i) {
    errs.run([&] {
      const int gi = batch.indices[i];
      const Eigen::VectorXd x = batch.rows->row(gi);
      const NoiseDraw eps = NoiseDraw::make(
          {ctx.seed, kPredNoiseStream, ctx.iteration,
           static_cast<std::uint64_t>(gi), 0},
          zd);
      const MeanFieldGaussian q = program.local(x, gi, lambda);
      const Eigen::VectorXd z = reparameterize(q, eps);

      Model::Ws ws;
      Eigen::VectorXd t(od);
      model.conditional(x, z, theta, t, &ws);

      // Jacobian of t in eta, one output coordinate at a time
      RowMajorXd J = RowMajorXd::Zero(od, D);
      Eigen::VectorXd dt(od);
      Eigen::VectorXd gz(zd);
      for (int r = 0; r < od; ++r) {
        dt.setZero();
        dt[r] = 1.0;
        gz.setZero();
        Eigen::Map<Eigen::VectorXd> row(J.data() + static_cast<std::ptrdiff_t>(r) * D, D);
        model.backprop(x, z, theta, &ws, dt, gz, row.segment(L, D - L), nullptr);
        program.pullback(x, gi, lambda, eps.values, gz, row.head(L), nullptr);
      }

      Eigen::MatrixXd Ft(od, od);
      model.out_fisher(t, Ft);
      slab.middleRows(static_cast<Eigen::Index>(i) * od, od) = psd_sqrt(Ft) * J;
    });
  });
  errs.rethrow();

  if (!slab.allFinite())
    throw NonFiniteGradient("fisher: exact Fisher rows are not finite");

  const Eigen::MatrixXd F = gram_weighted(slab, batch.scale(), true);
  return FisherEstimate{SymMatrix(F), 0, batch.scale(), batch.indices,
                        FisherKind::kVpng};
}

FisherEstimate estimate_naive_hessian(const Model& model,
                                      const VariationalProgram& program,
                                      const Layout& layout,
                                      const ParamVector& eta,
                                      const Batch& batch, int M,
                                      const SeedCtx& ctx) {
  require(M >= 1, "fisher: M must be >= 1");
  check_batch(batch, model);
  const int B = batch.size();
  const int D = layout.dim();
  const int zd = model.latent_dim();

  // step sizes for the second differences
  Eigen::VectorXd h(D);
  for (int a = 0; a < D; ++a) h[a] = 1e-3 * (1.0 + std::abs(eta[a]));

  RowMajorXd slab = RowMajorXd::Zero(static_cast<Eigen::Index>(B) * M, static_cast<Eigen::Index>(D) * D);

  ErrorCollector errs;
  parallel_for(static_cast<std::int64_t>(B) * M, [&](std::int64_t term) {
    errs.run([&] {
      const int i = static_cast<int>(term / M);
      const int k = static_cast<int>(term % M);
      const int gi = batch.indices[i];
      const Eigen::VectorXd xc = batch.rows->row(gi);

      // (z, x) from the model joint
      CounterRng zr({ctx.seed, kPredNoiseStream, ctx.iteration,
                     static_cast<std::uint64_t>(gi),
                     static_cast<std::uint64_t>(k)});
      Eigen::VectorXd z(zd);
      zr.fill_normal(z);
      z *= model.prior_sigma();
      CounterRng xr({ctx.seed, kPredDrawStream, ctx.iteration,
                     static_cast<std::uint64_t>(gi),
                     static_cast<std::uint64_t>(k)});
      const Eigen::VectorXd xt =
          model.sample_predictive(xc, z, layout.theta(eta), xr);

      // noise that reproduces z under the current variational parameters
      const MeanFieldGaussian q0 = program.local(xt, gi, layout.lambda(eta));
      const Eigen::VectorXd epsv =
          (z - q0.means).cwiseQuotient(q0.stddevs);

      auto f = [&](const ParamVector& e) {
        const MeanFieldGaussian q = program.local(xt, gi, layout.lambda(e));
        const Eigen::VectorXd zz = q.means + q.stddevs.cwiseProduct(epsv);
        return model.log_lik(xt, zz, layout.theta(e));
      };

      const double f0 = f(eta);
      Eigen::Map<RowMajorXd> H(slab.data() + term * D * D, D, D);
      ParamVector e = eta;
      for (int a = 0; a < D; ++a) {
        e[a] = eta[a] + h[a];
        const double fp = f(e);
        e[a] = eta[a] - h[a];
        const double fm = f(e);
        e[a] = eta[a];
        H(a, a) = (fp - 2.0 * f0 + fm) / (h[a] * h[a]);
      }
      for (int a = 0; a < D; ++a) {
        for (int bcol = a + 1; bcol < D; ++bcol) {
          double v = 0.0;
          for (int sa : {+1, -1}) {
            for (int sb : {+1, -1}) {
              e[a] = eta[a] + sa * h[a];
              e[bcol] = eta[bcol] + sb * h[bcol];
              v += sa * sb * f(e);
            }
          }
          e[a] = eta[a];
          e[bcol] = eta[bcol];
          v /= 4.0 * h[a] * h[bcol];
          H(a, bcol) = v;
          H(bcol, a) = v;
        }
      }
    });
  });
  errs.rethrow();

  tree_fold_rows(slab, true);
  Eigen::MatrixXd Hbar =
      -(batch.scale() / M) *
      Eigen::Map<const RowMajorXd>(slab.data(), D, D);
  if (!Hbar.allFinite())
    throw NonFiniteGradient("fisher: naive Hessian is not finite");
  return FisherEstimate{SymMatrix(Hbar, SymMatrix::Symmetrize), M,
                        batch.scale(), batch.indices,
                        FisherKind::kNaiveHessian};
}

ParamVector vpng_direction(const FisherEstimate& F, double mu,
                           const ParamVector& grad) {
  require(F.kind == FisherKind::kVpng,
          "vpng_direction: needs a vpng-kind estimate");
  require(F.matrix.dim() == grad.size(),
          "vpng_direction: dimension mismatch");
  require(mu >= 0.0, "vpng_direction: mu must be >= 0");
  return dampened_solve(F.matrix, mu, grad);
}

ParamVector q_natural_direction(const VariationalProgram& program,
                                const Layout& layout, const ParamVector& eta,
                                double mu, const ParamVector& grad) {
  require(mu >= 0.0, "q_natural_direction: mu must be >= 0");
  require(grad.size() == layout.dim(), "q_natural_direction: dimension mismatch");
  Eigen::VectorXd diag;
  if (!program.q_fisher_diag(layout.lambda(eta), diag))
    throw NotSupported(
        "q_natural_direction: family Fisher is not diagonal; "
        "no dense natural-gradient path for amortized programs");
  const int L = layout.lambda_dim();
  ParamVector out = grad;
  out.head(L) = grad.head(L).array() / (diag.array() + mu);
  return out;
}

KlQuadratic symmetric_kl_quadratic_check(const Model& model,
                                         const VariationalProgram& program,
                                         const Layout& layout,
                                         const ParamVector& eta,
                                         const ParamVector& delta_eta,
                                         const Batch& batch, int n_eps,
                                         std::uint64_t seed) {
  require(n_eps >= 1, "fisher: n_eps must be >= 1");
  require(delta_eta.size() == layout.dim(), "fisher: delta dimension mismatch");
  check_batch(batch, model);

  const int B = batch.size();
  const int zd = model.latent_dim();
  const ParamVector eta2 = eta + delta_eta;
  const auto l1 = layout.lambda(eta);
  const auto t1v = layout.theta(eta);
  const auto l2 = layout.lambda(eta2);
  const auto t2v = layout.theta(eta2);

  double lhs = 0.0;
  double rhs = 0.0;
  for (int e = 0; e < n_eps; ++e) {
    const SeedCtx ctx{seed, static_cast<std::uint64_t>(e), kPredNoiseStream};
    const FisherEstimate Fe =
        exact_predictive_fisher(model, program, layout, eta, batch, ctx);
    rhs += delta_eta.dot(Fe.matrix.dense() * delta_eta);

    Eigen::VectorXd kls(B);
    ErrorCollector errs;
    parallel_for(B, [&](std::int64_t i) {
      errs.run([&] {
        const int gi = batch.indices[i];
        const Eigen::VectorXd x = batch.rows->row(gi);
        const NoiseDraw eps = NoiseDraw::make(
            {seed, kPredNoiseStream, static_cast<std::uint64_t>(e),
             static_cast<std::uint64_t>(gi), 0},
            zd);
        const Eigen::VectorXd za = reparameterize(program.local(x, gi, l1), eps);
        const Eigen::VectorXd zb = reparameterize(program.local(x, gi, l2), eps);
        Eigen::VectorXd ta(model.out_dim()), tb(model.out_dim());
        model.conditional(x, za, t1v, ta, nullptr);
        model.conditional(x, zb, t2v, tb, nullptr);
        kls[i] = model.out_sym_kl(ta, tb);
      });
    });
    errs.rethrow();
    lhs += batch.scale() * tree_fold(kls, true);
  }
  return KlQuadratic{lhs / n_eps, rhs / n_eps};
}

}  // namespace vpng
