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

#ifndef VPNG_MODELS_MINI_VAE_HPP_
#define VPNG_MODELS_MINI_VAE_HPP_

#include "vpng/family.hpp"
#include "vpng/model.hpp"

namespace vpng {

// Bernoulli VAE decoder:
//   z ~ N(0, I),  x | z ~ prod_j Bernoulli(sigmoid(logits_j)),
//   logits = affine(tanh(affine(tanh(affine(z))))).
class MiniVaeModel : public Model {
 public:
  MiniVaeModel(int pixels, int latent, int hidden);

  int latent_dim() const override { return latent_; }
  int data_dim() const override { return pixels_; }
  int theta_dim() const override { return net_.param_count(); }
  int out_dim() const override { return pixels_; }

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

 private:
  int pixels_, latent_, hidden_;
  Mlp net_;
};

// Matching amortized family: an MLP of the same depth maps x to
// (means, log-stddevs) of q(z|x).
class MlpEncoder : public VariationalProgram {
 public:
  MlpEncoder(int pixels, int latent, int hidden);

  int lambda_dim() const override { return net_.param_count(); }
  int latent_dim() const override { return latent_; }
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
  void init_lambda(std::uint64_t seed, Eigen::Ref<Eigen::VectorXd> lambda) const override;
  void append_lambda_blocks(Layout& layout) const override;

  const Mlp* inference_net() const override { return &net_; }

 private:
  int latent_;
  Mlp net_;
};

}  // namespace vpng

#endif  // VPNG_MODELS_MINI_VAE_HPP_
