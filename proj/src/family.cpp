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

#include "vpng/family.hpp"

#include <cmath>

#include "vpng/errors.hpp"

namespace vpng {

namespace {

void check_family(const MeanFieldGaussian& q) {
  if (q.means.size() != q.stddevs.size())
    throw DimensionMismatch("MeanFieldGaussian: means/stddevs size mismatch");
  if ((q.stddevs.array() <= 0.0).any())
    throw Error("MeanFieldGaussian: stddevs must be positive");
}

// KL(N(m, s^2) || N(0, s0^2)) summed over coordinates
double kl_diag(const Eigen::Ref<const Eigen::VectorXd>& m,
               const Eigen::Ref<const Eigen::VectorXd>& s, double s0) {
  const double inv2 = 1.0 / (s0 * s0);
  double kl = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i)
    kl += 0.5 * ((m[i] * m[i] + s[i] * s[i]) * inv2 - 1.0) -
          std::log(s[i] / s0);
  return kl;
}

}  // namespace

Eigen::VectorXd reparameterize(const MeanFieldGaussian& q, const NoiseDraw& eps) {
  check_family(q);
  if (eps.values.size() != q.dim())
    throw DimensionMismatch("reparameterize: noise dim != family dim");
  return q.means + q.stddevs.cwiseProduct(eps.values);
}

Eigen::VectorXd pullback_to_lambda(const MeanFieldGaussian& q,
                                   const NoiseDraw& eps,
                                   const Eigen::VectorXd& grad_z) {
  check_family(q);
  if (grad_z.size() != q.dim())
    throw DimensionMismatch("pullback_to_lambda: grad dim != family dim");
  if (!q.learn_stddev) return grad_z;
  Eigen::VectorXd out(2 * q.dim());
  out.head(q.dim()) = grad_z;
  out.tail(q.dim()) = grad_z.cwiseProduct(eps.values);  // dz/ds = eps
  return out;
}

double kl_to_standard_normal(const MeanFieldGaussian& q) {
  check_family(q);
  return kl_diag(q.means, q.stddevs, 1.0);
}

SymMatrix q_fisher(const MeanFieldGaussian& q) {
  check_family(q);
  const int d = q.dim();
  const int n = q.learn_stddev ? 2 * d : d;
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < d; ++i) {
    const double inv = 1.0 / (q.stddevs[i] * q.stddevs[i]);
    F(i, i) = inv;
    if (q.learn_stddev) F(d + i, d + i) = 2.0 * inv;
  }
  return SymMatrix(F);
}

// --- GlobalMeanField -------------------------------------------------------

GlobalMeanField::GlobalMeanField(int dim, bool learn_stddev, double sigma)
    : dim_(dim), learn_(learn_stddev), sigma_(sigma) {
  require(dim >= 1, "GlobalMeanField: dim must be >= 1");
  require(sigma > 0.0, "GlobalMeanField: sigma must be > 0");
}

MeanFieldGaussian GlobalMeanField::local(
    const Eigen::Ref<const Eigen::VectorXd>&, int,
    const Eigen::Ref<const Eigen::VectorXd>& lambda) const {
  MeanFieldGaussian q;
  q.means = lambda.head(dim_);
  if (learn_)
    q.stddevs = lambda.tail(dim_).array().exp();
  else
    q.stddevs = Eigen::VectorXd::Constant(dim_, sigma_);
  q.learn_stddev = learn_;
  return q;
}

void GlobalMeanField::pullback(const Eigen::Ref<const Eigen::VectorXd>&, int,
                               const Eigen::Ref<const Eigen::VectorXd>& lambda,
                               const Eigen::Ref<const Eigen::VectorXd>& eps,
                               const Eigen::Ref<const Eigen::VectorXd>& grad_z,
                               Eigen::Ref<Eigen::VectorXd> grad_lambda,
                               const LayerSink*) const {
  grad_lambda.head(dim_) += grad_z;
  if (learn_) {
    // d z / d log s = s .* eps
    const auto s = lambda.tail(dim_).array().exp();
    grad_lambda.tail(dim_).array() += grad_z.array() * eps.array() * s;
  }
}

double GlobalMeanField::kl_to_prior(const Eigen::Ref<const Eigen::VectorXd>&, int,
                                    const Eigen::Ref<const Eigen::VectorXd>& lambda,
                                    double prior_sigma, double weight,
                                    Eigen::Ref<Eigen::VectorXd> grad_lambda) const {
  const auto m = lambda.head(dim_);
  Eigen::VectorXd s;
  if (learn_)
    s = lambda.tail(dim_).array().exp();
  else
    s = Eigen::VectorXd::Constant(dim_, sigma_);
  if (weight != 0.0) {
    const double inv2 = 1.0 / (prior_sigma * prior_sigma);
    grad_lambda.head(dim_) += weight * inv2 * m;
    if (learn_)  // dKL/dlog s = s^2/s0^2 - 1
      grad_lambda.tail(dim_).array() +=
          weight * (s.array().square() * inv2 - 1.0);
  }
  return kl_diag(m, s, prior_sigma);
}

bool GlobalMeanField::q_fisher_diag(const Eigen::Ref<const Eigen::VectorXd>& lambda,
                                    Eigen::VectorXd& out) const {
  out.resize(lambda_dim());
  const Eigen::ArrayXd s = learn_ ? lambda.tail(dim_).array().exp().eval()
                                  : Eigen::ArrayXd::Constant(dim_, sigma_).eval();
  out.head(dim_) = s.square().inverse();
  if (learn_) out.tail(dim_).setConstant(2.0);
  return true;
}

void GlobalMeanField::init_lambda(std::uint64_t, Eigen::Ref<Eigen::VectorXd> lambda) const {
  lambda.head(dim_).setZero();
  if (learn_) lambda.tail(dim_).setConstant(std::log(sigma_));
}

void GlobalMeanField::append_lambda_blocks(Layout& layout) const {
  layout.add("lambda.means", dim_);
  if (learn_) layout.add("lambda.log_stddevs", dim_);
}

// --- PerDatapointMeanField -------------------------------------------------

PerDatapointMeanField::PerDatapointMeanField(int n_points, int latent_dim,
                                             double init_sigma,
                                             double init_mean_scale)
    : n_(n_points), dim_(latent_dim), init_sigma_(init_sigma),
      init_mean_scale_(init_mean_scale) {
  require(n_points >= 1 && latent_dim >= 1, "PerDatapointMeanField: bad sizes");
  require(init_sigma > 0.0, "PerDatapointMeanField: init_sigma must be > 0");
}

MeanFieldGaussian PerDatapointMeanField::local(
    const Eigen::Ref<const Eigen::VectorXd>&, int data_index,
    const Eigen::Ref<const Eigen::VectorXd>& lambda) const {
  require(data_index >= 0 && data_index < n_,
          "PerDatapointMeanField: data index out of range");
  MeanFieldGaussian q;
  q.means = lambda.segment(data_index * dim_, dim_);
  q.stddevs =
      lambda.segment(n_ * dim_ + data_index * dim_, dim_).array().exp();
  q.learn_stddev = true;
  return q;
}

void PerDatapointMeanField::pullback(
    const Eigen::Ref<const Eigen::VectorXd>&, int data_index,
    const Eigen::Ref<const Eigen::VectorXd>& lambda,
    const Eigen::Ref<const Eigen::VectorXd>& eps,
    const Eigen::Ref<const Eigen::VectorXd>& grad_z,
    Eigen::Ref<Eigen::VectorXd> grad_lambda, const LayerSink*) const {
  const int mo = data_index * dim_;
  const int so = n_ * dim_ + data_index * dim_;
  grad_lambda.segment(mo, dim_) += grad_z;
  const auto s = lambda.segment(so, dim_).array().exp();
  grad_lambda.segment(so, dim_).array() += grad_z.array() * eps.array() * s;
}

double PerDatapointMeanField::kl_to_prior(
    const Eigen::Ref<const Eigen::VectorXd>&, int data_index,
    const Eigen::Ref<const Eigen::VectorXd>& lambda, double prior_sigma,
    double weight, Eigen::Ref<Eigen::VectorXd> grad_lambda) const {
  const int mo = data_index * dim_;
  const int so = n_ * dim_ + data_index * dim_;
  const auto m = lambda.segment(mo, dim_);
  const Eigen::VectorXd s = lambda.segment(so, dim_).array().exp();
  if (weight != 0.0) {
    const double inv2 = 1.0 / (prior_sigma * prior_sigma);
    grad_lambda.segment(mo, dim_) += weight * inv2 * m;
    grad_lambda.segment(so, dim_).array() +=
        weight * (s.array().square() * inv2 - 1.0);
  }
  return kl_diag(m, s, prior_sigma);
}

bool PerDatapointMeanField::q_fisher_diag(
    const Eigen::Ref<const Eigen::VectorXd>& lambda, Eigen::VectorXd& out) const {
  out.resize(lambda_dim());
  const int nd = n_ * dim_;
  out.head(nd) = lambda.tail(nd).array().exp().square().inverse();
  out.tail(nd).setConstant(2.0);
  return true;
}

void PerDatapointMeanField::init_lambda(std::uint64_t seed,
                                        Eigen::Ref<Eigen::VectorXd> lambda) const {
  CounterRng rng(NoiseKey{seed, kInitStream, 0, 1, 0});
  for (int i = 0; i < n_ * dim_; ++i)
    lambda[i] = init_mean_scale_ * rng.normal();
  lambda.tail(n_ * dim_).setConstant(std::log(init_sigma_));
}

void PerDatapointMeanField::append_lambda_blocks(Layout& layout) const {
  layout.add("lambda.means", n_ * dim_);
  layout.add("lambda.log_stddevs", n_ * dim_);
}

}  // namespace vpng
