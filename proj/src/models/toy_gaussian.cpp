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

#include "vpng/models/toy_gaussian.hpp"

#include <cmath>

#include "vpng/errors.hpp"

namespace vpng {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
}

ToyGaussianModel::ToyGaussianModel(double eps_corr) : eps_(eps_corr) {
  require(eps_corr >= 0.0 && eps_corr <= 1.0,
          "ToyGaussianModel: eps_corr must be in [0, 1]");
  cov_ << 1.0, 1.0 - eps_corr, 1.0 - eps_corr, 1.0;
  const double det = eps_corr * (2.0 - eps_corr);
  if (det <= 0.0)
    throw SingularCovariance("ToyGaussianModel: Sigma is singular at eps_corr = " +
                             std::to_string(eps_corr));
  cov_inv_ << 1.0, -(1.0 - eps_corr), -(1.0 - eps_corr), 1.0;
  cov_inv_ /= det;
  log_det_ = std::log(det);
  chol_ = Eigen::LLT<Eigen::Matrix2d>(cov_).matrixL();
}

void ToyGaussianModel::conditional(const Eigen::Ref<const Eigen::VectorXd>&,
                                   const Eigen::Ref<const Eigen::VectorXd>& z,
                                   const Eigen::Ref<const Eigen::VectorXd>&,
                                   Eigen::Ref<Eigen::VectorXd> t, Ws*) const {
  t = z;
}

void ToyGaussianModel::backprop(const Eigen::Ref<const Eigen::VectorXd>&,
                                const Eigen::Ref<const Eigen::VectorXd>&,
                                const Eigen::Ref<const Eigen::VectorXd>&, const Ws*,
                                const Eigen::Ref<const Eigen::VectorXd>& dt,
                                Eigen::Ref<Eigen::VectorXd> grad_z,
                                Eigen::Ref<Eigen::VectorXd>,
                                const LayerSink*) const {
  grad_z += dt;
}

double ToyGaussianModel::out_loglik(const Eigen::Ref<const Eigen::VectorXd>& x,
                                    const Eigen::Ref<const Eigen::VectorXd>& t) const {
  const Eigen::Vector2d d = x - t;
  return -0.5 * d.dot(cov_inv_ * d) - kLog2Pi - 0.5 * log_det_;
}

void ToyGaussianModel::out_dloglik(const Eigen::Ref<const Eigen::VectorXd>& x,
                                   const Eigen::Ref<const Eigen::VectorXd>& t,
                                   Eigen::Ref<Eigen::VectorXd> dt) const {
  dt = cov_inv_ * (x - t);
}

void ToyGaussianModel::out_sample(const Eigen::Ref<const Eigen::VectorXd>&,
                                  const Eigen::Ref<const Eigen::VectorXd>& t,
                                  CounterRng& rng,
                                  Eigen::Ref<Eigen::VectorXd> x_new) const {
  Eigen::Vector2d n(rng.normal(), rng.normal());
  x_new = t + chol_ * n;
}

double ToyGaussianModel::out_sym_kl(const Eigen::Ref<const Eigen::VectorXd>& t1,
                                    const Eigen::Ref<const Eigen::VectorXd>& t2) const {
  // equal covariances: KL(p||q) + KL(q||p) = (t1-t2)^T Sigma^{-1} (t1-t2)
  const Eigen::Vector2d d = t1 - t2;
  return d.dot(cov_inv_ * d);
}

void ToyGaussianModel::out_fisher(const Eigen::Ref<const Eigen::VectorXd>&,
                                  Eigen::MatrixXd& F) const {
  F = cov_inv_;
}

ToyPosterior toy_posterior(const ToyGaussianModel& model,
                           const Eigen::MatrixXd& data) {
  require(data.cols() == 2, "toy_posterior: data must be n x 2");
  const double n = static_cast<double>(data.rows());
  const Eigen::Vector2d sum = data.colwise().sum().transpose();

  ToyPosterior post;
  const Eigen::Matrix2d prec =
      n * model.cov_inverse() + Eigen::Matrix2d::Identity();
  post.cov = prec.inverse();
  post.mean = (n * Eigen::Matrix2d::Identity() + model.cov()).inverse() * sum;
  return post;
}

Eigen::Vector2d toy_elbo_gradient(const ToyGaussianModel& model,
                                  const Eigen::MatrixXd& data,
                                  const Eigen::Vector2d& lambda) {
  require(data.cols() == 2, "toy_elbo_gradient: data must be n x 2");
  const double n = static_cast<double>(data.rows());
  const Eigen::Vector2d sum = data.colwise().sum().transpose();
  return -lambda + model.cov_inverse() * (sum - n * lambda);
}

}  // namespace vpng
