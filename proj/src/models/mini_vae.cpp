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

#include "vpng/models/mini_vae.hpp"

#include <cmath>

#include "vpng/errors.hpp"

namespace vpng {

MiniVaeModel::MiniVaeModel(int pixels, int latent, int hidden)
    : pixels_(pixels),
      latent_(latent),
      hidden_(hidden),
      net_({latent, hidden, hidden, pixels}, /*bias=*/true) {
  require(pixels >= 1 && latent >= 1 && hidden >= 1,
          "MiniVaeModel: dimensions must be positive");
}

void MiniVaeModel::conditional(const Eigen::Ref<const Eigen::VectorXd>&,
                               const Eigen::Ref<const Eigen::VectorXd>& z,
                               const Eigen::Ref<const Eigen::VectorXd>& theta,
                               Eigen::Ref<Eigen::VectorXd> t, Ws* ws) const {
  net_.forward(theta, z, t, ws ? &ws->net : nullptr);
}

void MiniVaeModel::backprop(const Eigen::Ref<const Eigen::VectorXd>&,
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
    Eigen::VectorXd t(pixels_);
    net_.forward(theta, z, t, &scratch);
    acts = &scratch;
  }
  Eigen::VectorXd dz(latent_);
  net_.backward(theta, *acts, dt, grad_theta, &dz, sink);
  grad_z += dz;
}

double MiniVaeModel::out_loglik(const Eigen::Ref<const Eigen::VectorXd>& x,
                                const Eigen::Ref<const Eigen::VectorXd>& t) const {
  double ll = 0.0;
  for (int j = 0; j < pixels_; ++j) ll += bernoulli_loglik(x[j], t[j]);
  return ll;
}

void MiniVaeModel::out_dloglik(const Eigen::Ref<const Eigen::VectorXd>& x,
                               const Eigen::Ref<const Eigen::VectorXd>& t,
                               Eigen::Ref<Eigen::VectorXd> dt) const {
  for (int j = 0; j < pixels_; ++j) dt[j] = x[j] - sigmoid(t[j]);
}

void MiniVaeModel::out_sample(const Eigen::Ref<const Eigen::VectorXd>&,
                              const Eigen::Ref<const Eigen::VectorXd>& t,
                              CounterRng& rng,
                              Eigen::Ref<Eigen::VectorXd> x_new) const {
  for (int j = 0; j < pixels_; ++j)
    x_new[j] = static_cast<double>(rng.bernoulli_logit(t[j]));
}

double MiniVaeModel::out_sym_kl(const Eigen::Ref<const Eigen::VectorXd>& t1,
                                const Eigen::Ref<const Eigen::VectorXd>& t2) const {
  double kl = 0.0;
  for (int j = 0; j < pixels_; ++j)
    kl += (sigmoid(t1[j]) - sigmoid(t2[j])) * (t1[j] - t2[j]);
  return kl;
}

void MiniVaeModel::out_fisher(const Eigen::Ref<const Eigen::VectorXd>& t,
                              Eigen::MatrixXd& F) const {
  F.setZero(pixels_, pixels_);
  for (int j = 0; j < pixels_; ++j) {
    const double p = sigmoid(t[j]);
    F(j, j) = p * (1.0 - p);
  }
}

void MiniVaeModel::append_theta_blocks(Layout& layout) const {
  for (int l = 0; l < net_.layers(); ++l)
    layout.add("theta.dec" + std::to_string(l), net_.layer_param_count(l));
}

void MiniVaeModel::init_theta(std::uint64_t seed,
                              Eigen::Ref<Eigen::VectorXd> theta) const {
  net_.init_params(seed, /*unit=*/2, theta);
}

// ---------------------------------------------------------------------------

MlpEncoder::MlpEncoder(int pixels, int latent, int hidden)
    : latent_(latent), net_({pixels, hidden, hidden, 2 * latent}, /*bias=*/true) {
  require(pixels >= 1 && latent >= 1 && hidden >= 1,
          "MlpEncoder: dimensions must be positive");
}

MeanFieldGaussian MlpEncoder::local(const Eigen::Ref<const Eigen::VectorXd>& x, int,
                                    const Eigen::Ref<const Eigen::VectorXd>& lambda) const {
  Eigen::VectorXd out(2 * latent_);
  net_.forward(lambda, x, out, nullptr);
  MeanFieldGaussian q;
  q.means = out.head(latent_);
  q.stddevs = out.tail(latent_).array().exp();
  q.learn_stddev = true;
  return q;
}

void MlpEncoder::pullback(const Eigen::Ref<const Eigen::VectorXd>& x, int,
                          const Eigen::Ref<const Eigen::VectorXd>& lambda,
                          const Eigen::Ref<const Eigen::VectorXd>& eps,
                          const Eigen::Ref<const Eigen::VectorXd>& grad_z,
                          Eigen::Ref<Eigen::VectorXd> grad_lambda,
                          const LayerSink* sink) const {
  Mlp::Ws ws;
  Eigen::VectorXd out(2 * latent_);
  net_.forward(lambda, x, out, &ws);

  // z = m + exp(u) .* eps with out = (m, u)
  Eigen::VectorXd dout(2 * latent_);
  dout.head(latent_) = grad_z;
  dout.tail(latent_) =
      grad_z.array() * eps.array() * out.tail(latent_).array().exp();
  net_.backward(lambda, ws, dout, grad_lambda, nullptr, sink);
}

double MlpEncoder::kl_to_prior(const Eigen::Ref<const Eigen::VectorXd>& x, int,
                               const Eigen::Ref<const Eigen::VectorXd>& lambda,
                               double prior_sigma, double weight,
                               Eigen::Ref<Eigen::VectorXd> grad_lambda) const {
  Mlp::Ws ws;
  Eigen::VectorXd out(2 * latent_);
  net_.forward(lambda, x, out, &ws);

  const double s0 = prior_sigma;
  double kl = 0.0;
  for (int j = 0; j < latent_; ++j) {
    const double m = out[j];
    const double s = std::exp(out[latent_ + j]);
    kl += 0.5 * ((m * m + s * s) / (s0 * s0) - 1.0) - std::log(s / s0);
  }
  if (weight != 0.0) {
    Eigen::VectorXd dout(2 * latent_);
    for (int j = 0; j < latent_; ++j) {
      const double m = out[j];
      const double s = std::exp(out[latent_ + j]);
      dout[j] = weight * m / (s0 * s0);
      dout[latent_ + j] = weight * (s * s / (s0 * s0) - 1.0);
    }
    net_.backward(lambda, ws, dout, grad_lambda, nullptr, nullptr);
  }
  return kl;
}

void MlpEncoder::init_lambda(std::uint64_t seed,
                             Eigen::Ref<Eigen::VectorXd> lambda) const {
  net_.init_params(seed, /*unit=*/1, lambda);
}

void MlpEncoder::append_lambda_blocks(Layout& layout) const {
  for (int l = 0; l < net_.layers(); ++l)
    layout.add("lambda.enc" + std::to_string(l), net_.layer_param_count(l));
}

}  // namespace vpng
