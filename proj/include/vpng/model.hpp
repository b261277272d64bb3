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

#ifndef VPNG_MODEL_HPP_
#define VPNG_MODEL_HPP_

#include <cstdint>

#include <Eigen/Dense>

#include "vpng/layout.hpp"
#include "vpng/mlp.hpp"
#include "vpng/rng.hpp"

namespace vpng {

// numerically safe pieces shared by the likelihood heads
inline double softplus(double t) {
  // log(1 + e^t) without overflow
  return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
}
inline double sigmoid(double t) {
  return t >= 0.0 ? 1.0 / (1.0 + std::exp(-t))
                  : std::exp(t) / (1.0 + std::exp(t));
}
// log p(y | logit t) for y in {0, 1}
inline double bernoulli_loglik(double y, double t) {
  return y * t - softplus(t);
}

// A model is a conditional likelihood p(x | z; theta) plus an isotropic
// Gaussian prior on z. The conditional factors through an "output parameter"
// vector t(x, z, theta) (means, logits or pre-softplus activations depending
// on the head), which is where predictive sampling, the exact conditional
// Fisher and the symmetric KL all live.
//
// x plays two roles: the scored record and the conditioning context. Models
// whose likelihood is over part of the record (logreg: the label, given
// covariates) read the context from x and resample only the modeled part.
class Model {
 public:
  virtual ~Model() = default;

  virtual int latent_dim() const = 0;
  virtual int data_dim() const = 0;
  virtual int theta_dim() const = 0;
  virtual int out_dim() const = 0;

  virtual double prior_sigma() const { return 1.0; }
  // log N(z; 0, prior_sigma^2 I)
  double log_prior(const Eigen::Ref<const Eigen::VectorXd>& z) const;

  struct Ws {
    Mlp::Ws net;             // generative-net activations when there is one
    Eigen::VectorXd cached_t;
  };

  virtual void conditional(const Eigen::Ref<const Eigen::VectorXd>& x,
                           const Eigen::Ref<const Eigen::VectorXd>& z,
                           const Eigen::Ref<const Eigen::VectorXd>& theta,
                           Eigen::Ref<Eigen::VectorXd> t, Ws* ws) const = 0;

  // grad_z += (dt/dz)^T dt and grad_theta += (dt/dtheta)^T dt.
  // ws may be null (models recompute what they need); when given it must come
  // from conditional() on the same (x, z, theta).
  virtual void backprop(const Eigen::Ref<const Eigen::VectorXd>& x,
                        const Eigen::Ref<const Eigen::VectorXd>& z,
                        const Eigen::Ref<const Eigen::VectorXd>& theta,
                        const Ws* ws, const Eigen::Ref<const Eigen::VectorXd>& dt,
                        Eigen::Ref<Eigen::VectorXd> grad_z,
                        Eigen::Ref<Eigen::VectorXd> grad_theta,
                        const LayerSink* sink = nullptr) const = 0;

  // head ops, all in terms of t
  virtual double out_loglik(const Eigen::Ref<const Eigen::VectorXd>& x,
                            const Eigen::Ref<const Eigen::VectorXd>& t) const = 0;
  virtual void out_dloglik(const Eigen::Ref<const Eigen::VectorXd>& x,
                           const Eigen::Ref<const Eigen::VectorXd>& t,
                           Eigen::Ref<Eigen::VectorXd> dt) const = 0;
  virtual void out_sample(const Eigen::Ref<const Eigen::VectorXd>& x_context,
                          const Eigen::Ref<const Eigen::VectorXd>& t,
                          CounterRng& rng, Eigen::Ref<Eigen::VectorXd> x_new) const = 0;
  // Jeffreys divergence KL(p_t1 || p_t2) + KL(p_t2 || p_t1), closed form
  virtual double out_sym_kl(const Eigen::Ref<const Eigen::VectorXd>& t1,
                            const Eigen::Ref<const Eigen::VectorXd>& t2) const = 0;
  // exact Fisher of the conditional w.r.t. t (out_dim x out_dim)
  virtual void out_fisher(const Eigen::Ref<const Eigen::VectorXd>& t,
                          Eigen::MatrixXd& F) const = 0;

  // composed conveniences
  double log_lik(const Eigen::Ref<const Eigen::VectorXd>& x,
                 const Eigen::Ref<const Eigen::VectorXd>& z,
                 const Eigen::Ref<const Eigen::VectorXd>& theta) const;
  // overwrites grad_z / grad_theta
  void grad_log_lik(const Eigen::Ref<const Eigen::VectorXd>& x,
                    const Eigen::Ref<const Eigen::VectorXd>& z,
                    const Eigen::Ref<const Eigen::VectorXd>& theta,
                    Eigen::VectorXd& grad_z, Eigen::VectorXd& grad_theta) const;
  Eigen::VectorXd sample_predictive(const Eigen::Ref<const Eigen::VectorXd>& x,
                                    const Eigen::Ref<const Eigen::VectorXd>& z,
                                    const Eigen::Ref<const Eigen::VectorXd>& theta,
                                    CounterRng& rng) const;

  // generative net for kfac stacking; null when the model is not a
  // feed-forward likelihood
  virtual const Mlp* generative_net() const { return nullptr; }

  virtual void append_theta_blocks(Layout& layout) const = 0;
  virtual void init_theta(std::uint64_t seed,
                          Eigen::Ref<Eigen::VectorXd> theta) const = 0;
};

}  // namespace vpng

#endif  // VPNG_MODEL_HPP_
