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

#ifndef VPNG_MODELS_TOY_GAUSSIAN_HPP_
#define VPNG_MODELS_TOY_GAUSSIAN_HPP_

#include "vpng/model.hpp"

namespace vpng {

// 2d Gaussian observations with a shared latent mean:
//   mu ~ N(0, I2),  x_i | mu ~ N(mu, Sigma),
//   Sigma = [[1, 1-eps], [1-eps, 1]].
// Small eps makes Sigma badly conditioned along (1,-1), which is the whole
// point of the model. eps = 0 is rejected (Sigma singular).
class ToyGaussianModel : public Model {
 public:
  explicit ToyGaussianModel(double eps_corr);

  int latent_dim() const override { return 2; }
  int data_dim() const override { return 2; }
  int theta_dim() const override { return 0; }
  int out_dim() const override { return 2; }

  double eps_corr() const { return eps_; }
  const Eigen::Matrix2d& cov() const { return cov_; }
  const Eigen::Matrix2d& cov_inverse() const { return cov_inv_; }

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

  void append_theta_blocks(Layout&) const override {}
  void init_theta(std::uint64_t, Eigen::Ref<Eigen::VectorXd>) const override {}

 private:
  double eps_;
  Eigen::Matrix2d cov_;
  Eigen::Matrix2d cov_inv_;
  Eigen::Matrix2d chol_;       // lower, for sampling
  double log_det_ = 0.0;
};

struct ToyPosterior {
  Eigen::Vector2d mean;
  Eigen::Matrix2d cov;
};

// Conjugate posterior of the shared mean given all rows of `data` (n x 2):
//   cov  = (n Sigma^{-1} + I)^{-1}
//   mean = (n I + Sigma)^{-1} * sum_i x_i
ToyPosterior toy_posterior(const ToyGaussianModel& model,
                           const Eigen::MatrixXd& data);

// Exact ELBO gradient in lambda for q = N(lambda, sigma^2 I), beta = 1:
//   -lambda + Sigma^{-1} (sum_i x_i - n lambda)
Eigen::Vector2d toy_elbo_gradient(const ToyGaussianModel& model,
                                  const Eigen::MatrixXd& data,
                                  const Eigen::Vector2d& lambda);

}  // namespace vpng

#endif  // VPNG_MODELS_TOY_GAUSSIAN_HPP_
