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

#ifndef VPNG_MODELS_SCALAR_LINEAR_HPP_
#define VPNG_MODELS_SCALAR_LINEAR_HPP_

#include "vpng/family.hpp"
#include "vpng/linalg.hpp"
#include "vpng/model.hpp"

namespace vpng {

// Scalar latent-variable model:
//   z_i ~ N(0, 1),  x_i | z_i ~ N(theta * z_i, 1)
// paired with the amortized family q(z|x; lambda) = N(lambda * x, sigma_q^2).
// Its only job is being the counterexample where the naive curvature
// estimate (the expected log-likelihood Hessian) goes indefinite.
class ScalarLinearGaussianModel : public Model {
 public:
  int latent_dim() const override { return 1; }
  int data_dim() const override { return 1; }
  int theta_dim() const override { return 1; }
  int out_dim() const override { return 1; }

  void conditional(const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& z,
                   const Eigen::Ref<const Eigen::VectorXd>& theta,
                   Eigen::Ref<Eigen::VectorXd> t, Ws* ws) const override;
  void backprop(const Eigen::Ref<const Eigen::VectorXd>& x,
                const Eigen::Ref<const Eigen::VectorXd>& z,
                const Eigen::Ref<const Eigen::VectorXd>& theta, const Ws* ws,
                const Eigen::Ref<const Eigen::VectorXd>& dt,
                Eigen::Ref<Eigen::VectorXd> grad_z,
                Eigen::Ref<Eigen::VectorXd> grad_theta,
                const LayerSink* sink) const override;

  double out_loglik(const Eigen::Ref<const Eigen::VectorXd>& x,
                    const Eigen::Ref<const Eigen::VectorXd>& t) const override;
  void out_dloglik(const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& t,
                   Eigen::Ref<Eigen::VectorXd> dt) const override;
  void out_sample(const Eigen::Ref<const Eigen::VectorXd>& x_context,
                  const Eigen::Ref<const Eigen::VectorXd>& t, CounterRng& rng,
                  Eigen::Ref<Eigen::VectorXd> x_new) const override;
  double out_sym_kl(const Eigen::Ref<const Eigen::VectorXd>& t1,
                    const Eigen::Ref<const Eigen::VectorXd>& t2) const override;
  void out_fisher(const Eigen::Ref<const Eigen::VectorXd>& t,
                  Eigen::MatrixXd& F) const override;

  void append_theta_blocks(Layout& layout) const override {
    layout.add("theta.slope", 1);
  }
  void init_theta(std::uint64_t, Eigen::Ref<Eigen::VectorXd> theta) const override {
    theta[0] = 0.5;
  }
};

// Expected negative log-likelihood Hessian of the scalar model in
// eta = (lambda, theta) order:
//   n * [[th^2 (th^2 + 1), th^2 - 1], [th^2 - 1, 1]]
// Indefinite exactly when |theta| < 1/sqrt(3).
SymMatrix counterexample_hessian(double theta, int n);

// q(z|x; lambda) = N(lambda * x, sigma_q^2), scalar lambda, fixed sigma_q.
class LinearAmortizedScalar : public VariationalProgram {
 public:
  LinearAmortizedScalar(double sigma_q, double init_lambda);

  int lambda_dim() const override { return 1; }
  int latent_dim() const override { return 1; }
  bool local_latents() const override { return true; }

  MeanFieldGaussian local(const Eigen::Ref<const Eigen::VectorXd>& x, int data_index,
                          const Eigen::Ref<const Eigen::VectorXd>& lambda) const override;
  void pullback(const Eigen::Ref<const Eigen::VectorXd>& x, int data_index,
                const Eigen::Ref<const Eigen::VectorXd>& lambda,
                const Eigen::Ref<const Eigen::VectorXd>& eps,
                const Eigen::Ref<const Eigen::VectorXd>& grad_z,
                Eigen::Ref<Eigen::VectorXd> grad_lambda,
                const LayerSink* sink) const override;
  double kl_to_prior(const Eigen::Ref<const Eigen::VectorXd>& x, int data_index,
                     const Eigen::Ref<const Eigen::VectorXd>& lambda,
                     double prior_sigma, double weight,
                     Eigen::Ref<Eigen::VectorXd> grad_lambda) const override;
  void init_lambda(std::uint64_t, Eigen::Ref<Eigen::VectorXd> lambda) const override {
    lambda[0] = init_;
  }
  void append_lambda_blocks(Layout& layout) const override {
    layout.add("lambda.coef", 1);
  }

 private:
  double sigma_q_;
  double init_;
};

}  // namespace vpng

#endif  // VPNG_MODELS_SCALAR_LINEAR_HPP_
