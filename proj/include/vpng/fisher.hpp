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

#ifndef VPNG_FISHER_HPP_
#define VPNG_FISHER_HPP_

#include <vector>

#include "vpng/elbo.hpp"
#include "vpng/family.hpp"
#include "vpng/layout.hpp"
#include "vpng/linalg.hpp"
#include "vpng/model.hpp"

namespace vpng {

enum class FisherKind { kVpng, kQFisherPadded, kNaiveHessian };

struct FisherEstimate {
  SymMatrix matrix;
  int mc_samples = 0;  // 0 marks an analytic (infinite-M) matrix
  double scale = 1.0;  // n / B carried by the estimate
  std::vector<int> indices;
  FisherKind kind = FisherKind::kVpng;
};

// Latents and resampled data for one batch: one noise draw per datapoint,
// M predictive draws from p(x' | zhat; theta) each. Fully determined by the
// seed metadata, so it can be regenerated bit-exactly.
struct PredictiveBatch {
  const Eigen::MatrixXd* rows = nullptr;
  std::vector<int> indices;
  int full_n = 0;
  int mc_samples = 0;
  std::vector<Eigen::VectorXd> eps;     // driving noise per datapoint
  std::vector<Eigen::VectorXd> zhat;    // g(x_i, eps_i; lambda)
  std::vector<Eigen::MatrixXd> xprime;  // per datapoint, M x data_dim

  int size() const { return static_cast<int>(indices.size()); }
  double scale() const { return static_cast<double>(full_n) / size(); }
};

// Draws zhat once per datapoint and M predictive points per zhat. Only seed
// and iteration are read from ctx; the noise and draw streams are fixed.
PredictiveBatch sample_predictive_batch(const Model& model,
                                        const VariationalProgram& program,
                                        const Layout& layout,
                                        const ParamVector& eta,
                                        const Batch& batch, int M,
                                        const SeedCtx& ctx);

// F_r estimate: (n/B) (1/M) sum over (i, k) of b b^T with
// b = grad_eta log p(x'_ik | zhat_i; theta). Positive semidefinite by
// construction.
FisherEstimate estimate_vpng_fisher(const Model& model,
                                    const VariationalProgram& program,
                                    const Layout& layout,
                                    const ParamVector& eta,
                                    const PredictiveBatch& pred);

// The infinite-M limit of the estimator at fixed noise draws:
// (n/B) sum_i J_i^T F_t(t_i) J_i with J_i the Jacobian of the output
// parameters in eta and F_t the exact conditional Fisher of the head.
// Shares the predictive noise stream, so it is the exact counterpart of
// estimate_vpng_fisher for the same (seed, iteration).
FisherEstimate exact_predictive_fisher(const Model& model,
                                       const VariationalProgram& program,
                                       const Layout& layout,
                                       const ParamVector& eta,
                                       const Batch& batch, const SeedCtx& ctx);

// Monte Carlo estimate of the negative expected log-likelihood Hessian with
// (z, x) drawn jointly from the model, the diagnostic that can go indefinite:
// draw z ~ p(z), x ~ p(x|z; theta), recover eps from (x, z) by inverting the
// reparameterization, then take central second differences of
// eta' -> log p(x | g(x, eps; lambda'); theta') and negate. Dense in dim(eta);
// meant for small instances only.
FisherEstimate estimate_naive_hessian(const Model& model,
                                      const VariationalProgram& program,
                                      const Layout& layout,
                                      const ParamVector& eta,
                                      const Batch& batch, int M,
                                      const SeedCtx& ctx);

// (F + mu I)^{-1} grad. Requires a vpng-kind estimate.
ParamVector vpng_direction(const FisherEstimate& F, double mu,
                           const ParamVector& grad);

// Classic natural gradient: lambda block solved against the diagonal
// q-Fisher (in layout coordinates), theta block passed through unchanged.
// Throws NotSupported when the family Fisher is not diagonal.
ParamVector q_natural_direction(const VariationalProgram& program,
                                const Layout& layout, const ParamVector& eta,
                                double mu, const ParamVector& grad);

struct KlQuadratic {
  double lhs = 0.0;  // mean symmetric KL between predictive models at
                     // eta and eta + delta, over noise draws and the batch
  double rhs = 0.0;  // delta^T F_r delta with the exact F_r on the same draws
};

// Second-order geometry check: the symmetric KL between the predictive
// model distributions at eta and eta + delta should match the F_r quadratic
// form up to a cubic remainder.
KlQuadratic symmetric_kl_quadratic_check(const Model& model,
                                         const VariationalProgram& program,
                                         const Layout& layout,
                                         const ParamVector& eta,
                                         const ParamVector& delta_eta,
                                         const Batch& batch, int n_eps,
                                         std::uint64_t seed);

}  // namespace vpng

#endif  // VPNG_FISHER_HPP_
