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

#ifndef VPNG_MODELS_POISSON_MF_HPP_
#define VPNG_MODELS_POISSON_MF_HPP_

#include "vpng/model.hpp"

namespace vpng {

// Poisson matrix factorization. A datapoint is one user's full rating row
// (zeros included); the latent is that user's preference vector:
//   beta_u ~ N(0, I_d),  x_uj | beta_u ~ Poisson(softplus(<theta_j, beta_u>)).
// theta stacks the per-item rows as a single bias-free linear layer, so the
// kfac backend sees the generative side as a one-layer network.
class PoissonMFModel : public Model {
 public:
  PoissonMFModel(int n_items, int latent);

  int latent_dim() const override { return latent_; }
  int data_dim() const override { return items_; }
  int theta_dim() const override { return net_.param_count(); }
  int out_dim() const override { return items_; }

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

  const Mlp* generative_net() const override { return &net_; }
  void append_theta_blocks(Layout& layout) const override;
  void init_theta(std::uint64_t seed, Eigen::Ref<Eigen::VectorXd> theta) const override;

  // item factor matrix (n_items x latent), for tests and data generation
  Eigen::MatrixXd factors(const Eigen::Ref<const Eigen::VectorXd>& theta) const;

 private:
  int items_, latent_;
  Mlp net_;
};

}  // namespace vpng

#endif  // VPNG_MODELS_POISSON_MF_HPP_
