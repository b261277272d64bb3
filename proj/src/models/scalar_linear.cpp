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

#include "vpng/models/scalar_linear.hpp"

#include <cmath>

#include "vpng/errors.hpp"

namespace vpng {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
}

void ScalarLinearGaussianModel::conditional(
    const Eigen::Ref<const Eigen::VectorXd>&,
    const Eigen::Ref<const Eigen::VectorXd>& z,
    const Eigen::Ref<const Eigen::VectorXd>& theta,
    Eigen::Ref<Eigen::VectorXd> t, Ws*) const {
  t[0] = theta[0] * z[0];
}

void ScalarLinearGaussianModel::backprop(
    const Eigen::Ref<const Eigen::VectorXd>&,
    const Eigen::Ref<const Eigen::VectorXd>& z,
    const Eigen::Ref<const Eigen::VectorXd>& theta, const Ws*,
    const Eigen::Ref<const Eigen::VectorXd>& dt,
    Eigen::Ref<Eigen::VectorXd> grad_z, Eigen::Ref<Eigen::VectorXd> grad_theta,
    const LayerSink*) const {
  grad_z[0] += theta[0] * dt[0];
  grad_theta[0] += z[0] * dt[0];
}

double ScalarLinearGaussianModel::out_loglik(
    const Eigen::Ref<const Eigen::VectorXd>& x,
    const Eigen::Ref<const Eigen::VectorXd>& t) const {
  const double d = x[0] - t[0];
  return -0.5 * d * d - 0.5 * kLog2Pi;
}

void ScalarLinearGaussianModel::out_dloglik(
    const Eigen::Ref<const Eigen::VectorXd>& x,
    const Eigen::Ref<const Eigen::VectorXd>& t,
    Eigen::Ref<Eigen::VectorXd> dt) const {
  dt[0] = x[0] - t[0];
}

void ScalarLinearGaussianModel::out_sample(
    const Eigen::Ref<const Eigen::VectorXd>&,
    const Eigen::Ref<const Eigen::VectorXd>& t, CounterRng& rng,
    Eigen::Ref<Eigen::VectorXd> x_new) const {
  x_new[0] = t[0] + rng.normal();
}

double ScalarLinearGaussianModel::out_sym_kl(
    const Eigen::Ref<const Eigen::VectorXd>& t1,
    const Eigen::Ref<const Eigen::VectorXd>& t2) const {
  const double d = t1[0] - t2[0];
  return d * d;
}

void ScalarLinearGaussianModel::out_fisher(
    const Eigen::Ref<const Eigen::VectorXd>&, Eigen::MatrixXd& F) const {
  F.resize(1, 1);
  F(0, 0) = 1.0;
}

SymMatrix counterexample_hessian(double theta, int n) {
  require(n >= 1, "counterexample_hessian: n must be >= 1");
  const double t2 = theta * theta;
  Eigen::Matrix2d H;
  H << t2 * (t2 + 1.0), t2 - 1.0,
       t2 - 1.0,        1.0;
  return SymMatrix(static_cast<double>(n) * H);
}

LinearAmortizedScalar::LinearAmortizedScalar(double sigma_q, double init_lambda)
    : sigma_q_(sigma_q), init_(init_lambda) {
  require(sigma_q > 0.0, "LinearAmortizedScalar: sigma_q must be > 0");
}

MeanFieldGaussian LinearAmortizedScalar::local(
    const Eigen::Ref<const Eigen::VectorXd>& x, int,
    const Eigen::Ref<const Eigen::VectorXd>& lambda) const {
  MeanFieldGaussian q;
  q.means = Eigen::VectorXd::Constant(1, lambda[0] * x[0]);
  q.stddevs = Eigen::VectorXd::Constant(1, sigma_q_);
  q.learn_stddev = false;
  return q;
}

void LinearAmortizedScalar::pullback(
    const Eigen::Ref<const Eigen::VectorXd>& x, int,
    const Eigen::Ref<const Eigen::VectorXd>&,
    const Eigen::Ref<const Eigen::VectorXd>&,
    const Eigen::Ref<const Eigen::VectorXd>& grad_z,
    Eigen::Ref<Eigen::VectorXd> grad_lambda, const LayerSink*) const {
  grad_lambda[0] += grad_z[0] * x[0];  // dz/dlambda = x
}

double LinearAmortizedScalar::kl_to_prior(
    const Eigen::Ref<const Eigen::VectorXd>& x, int,
    const Eigen::Ref<const Eigen::VectorXd>& lambda, double prior_sigma,
    double weight, Eigen::Ref<Eigen::VectorXd> grad_lambda) const {
  const double m = lambda[0] * x[0];
  const double s = sigma_q_;
  const double inv2 = 1.0 / (prior_sigma * prior_sigma);
  if (weight != 0.0) grad_lambda[0] += weight * m * inv2 * x[0];
  return 0.5 * ((m * m + s * s) * inv2 - 1.0) - std::log(s / prior_sigma);
}

}  // namespace vpng
