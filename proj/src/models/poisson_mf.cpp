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

#include "vpng/models/poisson_mf.hpp"

#include <cmath>

#include "vpng/errors.hpp"

namespace vpng {
namespace {

// log(softplus(t)): for very negative t, softplus(t) ~ e^t so the log is t
// itself; going through softplus would underflow near t = -745.
double log_softplus(double t) {
  return t < -30.0 ? t : std::log(softplus(t));
}

// sigmoid(t) / softplus(t), the log-derivative of the rate. Tends to 1 from
// below as t -> -inf; the direct quotient is already exact to double
// precision at t = -30.
double rate_logderiv(double t) {
  return t < -30.0 ? 1.0 : sigmoid(t) / softplus(t);
}

double checked_count(double v) {
  if (!(v >= 0.0) || v != std::floor(v))
    throw NonIntegerRating("PoissonMFModel: counts must be nonnegative integers");
  return v;
}

}  // namespace

PoissonMFModel::PoissonMFModel(int n_items, int latent)
    : items_(n_items), latent_(latent), net_({latent, n_items}, /*bias=*/false) {
  require(n_items >= 1 && latent >= 1,
          "PoissonMFModel: dimensions must be positive");
}

void PoissonMFModel::conditional(const Eigen::Ref<const Eigen::VectorXd>&,
                                 const Eigen::Ref<const Eigen::VectorXd>& z,
                                 const Eigen::Ref<const Eigen::VectorXd>& theta,
                                 Eigen::Ref<Eigen::VectorXd> t, Ws* ws) const {
  net_.forward(theta, z, t, ws ? &ws->net : nullptr);
}

void PoissonMFModel::backprop(const Eigen::Ref<const Eigen::VectorXd>&,
                              const Eigen::Ref<const Eigen::VectorXd>& z,
                              const Eigen::Ref<const Eigen::VectorXd>& theta,
                              const Ws* ws,
                              const Eigen::Ref<const Eigen::VectorXd>& dt,
                              Eigen::Ref<Eigen::VectorXd> grad_z,
                              Eigen::Ref<Eigen::VectorXd> grad_theta,
                              const LayerSink* sink) const {
  Mlp::Ws scratch;
  const Mlp::Ws* acts = ws ? &ws->net : nullptr;
  if (acts == nullptr) {
    Eigen::VectorXd t(items_);
    net_.forward(theta, z, t, &scratch);
    acts = &scratch;
  }
  Eigen::VectorXd dz(latent_);
  net_.backward(theta, *acts, dt, grad_theta, &dz, sink);
  grad_z += dz;
}

double PoissonMFModel::out_loglik(const Eigen::Ref<const Eigen::VectorXd>& x,
                                  const Eigen::Ref<const Eigen::VectorXd>& t) const {
  double ll = 0.0;
  for (int j = 0; j < items_; ++j) {
    const double k = checked_count(x[j]);
    ll -= softplus(t[j]) + std::lgamma(k + 1.0);
    if (k > 0.0) ll += k * log_softplus(t[j]);
  }
  return ll;
}

void PoissonMFModel::out_dloglik(const Eigen::Ref<const Eigen::VectorXd>& x,
                                 const Eigen::Ref<const Eigen::VectorXd>& t,
                                 Eigen::Ref<Eigen::VectorXd> dt) const {
  for (int j = 0; j < items_; ++j) {
    const double k = checked_count(x[j]);
    dt[j] = k * rate_logderiv(t[j]) - sigmoid(t[j]);
  }
}

void PoissonMFModel::out_sample(const Eigen::Ref<const Eigen::VectorXd>&,
                                const Eigen::Ref<const Eigen::VectorXd>& t,
                                CounterRng& rng,
                                Eigen::Ref<Eigen::VectorXd> x_new) const {
  for (int j = 0; j < items_; ++j)
    x_new[j] = static_cast<double>(rng.poisson(softplus(t[j])));
}

double PoissonMFModel::out_sym_kl(const Eigen::Ref<const Eigen::VectorXd>& t1,
                                  const Eigen::Ref<const Eigen::VectorXd>& t2) const {
  double kl = 0.0;
  for (int j = 0; j < items_; ++j)
    kl += (softplus(t1[j]) - softplus(t2[j])) *
          (log_softplus(t1[j]) - log_softplus(t2[j]));
  return kl;
}

void PoissonMFModel::out_fisher(const Eigen::Ref<const Eigen::VectorXd>& t,
                                Eigen::MatrixXd& F) const {
  // E[(d loglik / dt)^2] = sigmoid(t)^2 / rate, per item
  F.setZero(items_, items_);
  for (int j = 0; j < items_; ++j)
    F(j, j) = sigmoid(t[j]) * rate_logderiv(t[j]);
}

void PoissonMFModel::append_theta_blocks(Layout& layout) const {
  layout.add("theta.factors", net_.param_count());
}

void PoissonMFModel::init_theta(std::uint64_t seed,
                                Eigen::Ref<Eigen::VectorXd> theta) const {
  net_.init_params(seed, /*unit=*/2, theta);
}

Eigen::MatrixXd PoissonMFModel::factors(
    const Eigen::Ref<const Eigen::VectorXd>& theta) const {
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                        Eigen::RowMajor>>(theta.data(), items_,
                                                          latent_);
}

}  // namespace vpng
