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

#ifndef VPNG_MODELS_LOGREG_HPP_
#define VPNG_MODELS_LOGREG_HPP_

#include "vpng/model.hpp"

namespace vpng {

// Bayesian logistic regression. The latent is the weight vector itself:
//   w ~ N(0, sigma0^2 I),  y_i | x_i, w ~ Bernoulli(sigmoid(<w, (x_i, 1)>)).
// A data record is (features..., label); only the label is modeled, the
// features are context and predictive sampling copies them through.
// The trailing intercept coordinate can be disabled.
class LogRegModel : public Model {
 public:
  LogRegModel(int n_features, double prior_sigma = 100.0,
              bool include_bias = true);

  int latent_dim() const override { return nf_ + (bias_ ? 1 : 0); }
  int data_dim() const override { return nf_ + 1; }
  int theta_dim() const override { return 0; }
  int out_dim() const override { return 1; }
  double prior_sigma() const override { return prior_sigma_; }
  bool include_bias() const { return bias_; }

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

  // decision-function value for a weight vector (used for AUC scoring)
  double score(const Eigen::Ref<const Eigen::VectorXd>& w,
               const Eigen::Ref<const Eigen::VectorXd>& x) const;

 private:
  int nf_;
  double prior_sigma_;
  bool bias_;
};

}  // namespace vpng

#endif  // VPNG_MODELS_LOGREG_HPP_
