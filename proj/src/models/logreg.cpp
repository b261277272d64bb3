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

#include "vpng/models/logreg.hpp"

#include "vpng/errors.hpp"

namespace vpng {

LogRegModel::LogRegModel(int n_features, double prior_sigma, bool include_bias)
    : nf_(n_features), prior_sigma_(prior_sigma), bias_(include_bias) {
  require(n_features >= 1, "LogRegModel: need at least one feature");
  require(prior_sigma > 0.0, "LogRegModel: prior_sigma must be > 0");
}

double LogRegModel::score(const Eigen::Ref<const Eigen::VectorXd>& w,
                          const Eigen::Ref<const Eigen::VectorXd>& x) const {
  double t = w.head(nf_).dot(x.head(nf_));
  if (bias_) t += w[nf_];
  return t;
}

void LogRegModel::conditional(const Eigen::Ref<const Eigen::VectorXd>& x,
                              const Eigen::Ref<const Eigen::VectorXd>& z,
                              const Eigen::Ref<const Eigen::VectorXd>&,
                              Eigen::Ref<Eigen::VectorXd> t, Ws*) const {
  t[0] = score(z, x);
}

void LogRegModel::backprop(const Eigen::Ref<const Eigen::VectorXd>& x,
                           const Eigen::Ref<const Eigen::VectorXd>&,
                           const Eigen::Ref<const Eigen::VectorXd>&, const Ws*,
                           const Eigen::Ref<const Eigen::VectorXd>& dt,
                           Eigen::Ref<Eigen::VectorXd> grad_z,
                           Eigen::Ref<Eigen::VectorXd>,
                           const LayerSink*) const {
  grad_z.head(nf_) += dt[0] * x.head(nf_);
  if (bias_) grad_z[nf_] += dt[0];
}

double LogRegModel::out_loglik(const Eigen::Ref<const Eigen::VectorXd>& x,
                               const Eigen::Ref<const Eigen::VectorXd>& t) const {
  const double y = x[nf_];
  if (y != 0.0 && y != 1.0)
    throw Error("LogRegModel: label must be 0 or 1");
  return bernoulli_loglik(y, t[0]);
}

void LogRegModel::out_dloglik(const Eigen::Ref<const Eigen::VectorXd>& x,
                              const Eigen::Ref<const Eigen::VectorXd>& t,
                              Eigen::Ref<Eigen::VectorXd> dt) const {
  dt[0] = x[nf_] - sigmoid(t[0]);
}

void LogRegModel::out_sample(const Eigen::Ref<const Eigen::VectorXd>& x_context,
                             const Eigen::Ref<const Eigen::VectorXd>& t,
                             CounterRng& rng,
                             Eigen::Ref<Eigen::VectorXd> x_new) const {
  x_new.head(nf_) = x_context.head(nf_);  // covariates are not modeled
  x_new[nf_] = static_cast<double>(rng.bernoulli_logit(t[0]));
}

double LogRegModel::out_sym_kl(const Eigen::Ref<const Eigen::VectorXd>& t1,
                               const Eigen::Ref<const Eigen::VectorXd>& t2) const {
  return (sigmoid(t1[0]) - sigmoid(t2[0])) * (t1[0] - t2[0]);
}

void LogRegModel::out_fisher(const Eigen::Ref<const Eigen::VectorXd>& t,
                             Eigen::MatrixXd& F) const {
  const double p = sigmoid(t[0]);
  F.resize(1, 1);
  F(0, 0) = p * (1.0 - p);
}

}  // namespace vpng
