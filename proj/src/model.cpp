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

#include "vpng/model.hpp"

#include <cmath>

#include "vpng/errors.hpp"

namespace vpng {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
}

double Model::log_prior(const Eigen::Ref<const Eigen::VectorXd>& z) const {
  const double s = prior_sigma();
  const double d = static_cast<double>(z.size());
  return -0.5 * z.squaredNorm() / (s * s) - 0.5 * d * kLog2Pi - d * std::log(s);
}

double Model::log_lik(const Eigen::Ref<const Eigen::VectorXd>& x,
                      const Eigen::Ref<const Eigen::VectorXd>& z,
                      const Eigen::Ref<const Eigen::VectorXd>& theta) const {
  Eigen::VectorXd t(out_dim());
  conditional(x, z, theta, t, nullptr);
  return out_loglik(x, t);
}

void Model::grad_log_lik(const Eigen::Ref<const Eigen::VectorXd>& x,
                         const Eigen::Ref<const Eigen::VectorXd>& z,
                         const Eigen::Ref<const Eigen::VectorXd>& theta,
                         Eigen::VectorXd& grad_z,
                         Eigen::VectorXd& grad_theta) const {
  Ws ws;
  Eigen::VectorXd t(out_dim());
  conditional(x, z, theta, t, &ws);
  Eigen::VectorXd dt(out_dim());
  out_dloglik(x, t, dt);
  grad_z = Eigen::VectorXd::Zero(latent_dim());
  grad_theta = Eigen::VectorXd::Zero(theta_dim());
  backprop(x, z, theta, &ws, dt, grad_z, grad_theta, nullptr);
  if (!grad_z.allFinite() || !grad_theta.allFinite())
    throw NonFiniteGradient("grad_log_lik: non-finite gradient");
}

Eigen::VectorXd Model::sample_predictive(
    const Eigen::Ref<const Eigen::VectorXd>& x,
    const Eigen::Ref<const Eigen::VectorXd>& z,
    const Eigen::Ref<const Eigen::VectorXd>& theta, CounterRng& rng) const {
  Eigen::VectorXd t(out_dim());
  conditional(x, z, theta, t, nullptr);
  Eigen::VectorXd x_new(data_dim());
  out_sample(x, t, rng, x_new);
  return x_new;
}

}  // namespace vpng
