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

#ifndef VPNG_FAMILY_HPP_
#define VPNG_FAMILY_HPP_

#include <cstdint>
#include <memory>

#include <Eigen/Dense>

#include "vpng/layout.hpp"
#include "vpng/linalg.hpp"
#include "vpng/mlp.hpp"
#include "vpng/rng.hpp"

namespace vpng {

// Diagonal Gaussian q(z) = N(means, diag(stddevs^2)).
//
// Ops below work in (mean, stddev) coordinates. Optimizers never touch
// stddevs directly: learned scales enter the parameter layout as
// log-stddevs (unconstrained), and the VariationalProgram implementations
// chain the extra factor of stddev into their pullbacks. The q-Fisher for a
// log-stddev coordinate is the constant 2.
struct MeanFieldGaussian {
  Eigen::VectorXd means;
  Eigen::VectorXd stddevs;
  bool learn_stddev = false;

  int dim() const { return static_cast<int>(means.size()); }
};

// z = means + stddevs .* eps
Eigen::VectorXd reparameterize(const MeanFieldGaussian& q, const NoiseDraw& eps);

// Chain rule through the reparameterization: returns the gradient w.r.t.
// (means) or (means, stddevs) given dL/dz. Size dim() or 2*dim().
Eigen::VectorXd pullback_to_lambda(const MeanFieldGaussian& q,
                                   const NoiseDraw& eps,
                                   const Eigen::VectorXd& grad_z);

// KL(q || N(0, I)) = sum_i 0.5*(m_i^2 + s_i^2 - 1) - ln s_i
double kl_to_standard_normal(const MeanFieldGaussian& q);

// Fisher of q in (mean, stddev) coordinates: diag(1/s^2) over the mean block
// and, when learn_stddev, diag(2/s^2) over the stddev block.
SymMatrix q_fisher(const MeanFieldGaussian& q);

// ---------------------------------------------------------------------------

// How a model's latents are tied to the lambda block: a program maps
// (datapoint, lambda) to a local MeanFieldGaussian and pulls dL/dz back to
// lambda in *layout* coordinates (means, then log-stddevs where learned).
class VariationalProgram {
 public:
  virtual ~VariationalProgram() = default;

  virtual int lambda_dim() const = 0;
  virtual int latent_dim() const = 0;
  // true when each datapoint owns its own latent (KL is summed per point and
  // minibatch-scaled); false for a single global latent with one KL term.
  virtual bool local_latents() const = 0;

  virtual MeanFieldGaussian local(const Eigen::Ref<const Eigen::VectorXd>& x,
                                  int data_index,
                                  const Eigen::Ref<const Eigen::VectorXd>& lambda) const = 0;

  // grad_lambda += (dz/dlambda)^T grad_z, layout coordinates.
  // sink (optional) records inference-net layers for kfac.
  virtual void pullback(const Eigen::Ref<const Eigen::VectorXd>& x, int data_index,
                        const Eigen::Ref<const Eigen::VectorXd>& lambda,
                        const Eigen::Ref<const Eigen::VectorXd>& eps,
                        const Eigen::Ref<const Eigen::VectorXd>& grad_z,
                        Eigen::Ref<Eigen::VectorXd> grad_lambda,
                        const LayerSink* sink = nullptr) const = 0;

  // Returns KL(q(z|x) || N(0, prior_sigma^2 I)) and accumulates
  // weight * dKL/dlambda into grad_lambda (pass an empty Ref-free vector of
  // the right size; weight 0 skips the gradient).
  virtual double kl_to_prior(const Eigen::Ref<const Eigen::VectorXd>& x, int data_index,
                             const Eigen::Ref<const Eigen::VectorXd>& lambda,
                             double prior_sigma, double weight,
                             Eigen::Ref<Eigen::VectorXd> grad_lambda) const = 0;

  // Layout-coordinate diagonal q-Fisher (1/s^2 for means, 2 for log-stddevs).
  // false when the family Fisher is not diagonal (amortized nets).
  virtual bool q_fisher_diag(const Eigen::Ref<const Eigen::VectorXd>& lambda,
                             Eigen::VectorXd& out) const {
    (void)lambda;
    (void)out;
    return false;
  }

  virtual void init_lambda(std::uint64_t seed,
                           Eigen::Ref<Eigen::VectorXd> lambda) const = 0;
  virtual void append_lambda_blocks(Layout& layout) const = 0;

  // Inference net, when the program is an MLP encoder (kfac stacking).
  virtual const Mlp* inference_net() const { return nullptr; }
};

// One latent vector shared by the whole dataset (toy model, logreg weights).
class GlobalMeanField : public VariationalProgram {
 public:
  GlobalMeanField(int dim, bool learn_stddev, double sigma);

  int lambda_dim() const override { return learn_ ? 2 * dim_ : dim_; }
  int latent_dim() const override { return dim_; }
  bool local_latents() const override { return false; }

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
  bool q_fisher_diag(const Eigen::Ref<const Eigen::VectorXd>& lambda,
                     Eigen::VectorXd& out) const override;
  void init_lambda(std::uint64_t seed, Eigen::Ref<Eigen::VectorXd> lambda) const override;
  void append_lambda_blocks(Layout& layout) const override;

 private:
  int dim_;
  bool learn_;
  double sigma_;  // fixed value when !learn_, init value otherwise
};

// One latent row per datapoint (Poisson MF users). lambda holds all means
// first, then all log-stddevs, row-major by datapoint.
class PerDatapointMeanField : public VariationalProgram {
 public:
  PerDatapointMeanField(int n_points, int latent_dim, double init_sigma,
                        double init_mean_scale);

  int lambda_dim() const override { return 2 * n_ * dim_; }
  int latent_dim() const override { return dim_; }
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
  bool q_fisher_diag(const Eigen::Ref<const Eigen::VectorXd>& lambda,
                     Eigen::VectorXd& out) const override;
  void init_lambda(std::uint64_t seed, Eigen::Ref<Eigen::VectorXd> lambda) const override;
  void append_lambda_blocks(Layout& layout) const override;

  int points() const { return n_; }

 private:
  int n_;
  int dim_;
  double init_sigma_;
  double init_mean_scale_;
};

}  // namespace vpng

#endif  // VPNG_FAMILY_HPP_
