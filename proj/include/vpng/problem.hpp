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

#ifndef VPNG_PROBLEM_HPP_
#define VPNG_PROBLEM_HPP_

#include <cstdint>
#include <memory>

#include "vpng/family.hpp"
#include "vpng/layout.hpp"
#include "vpng/model.hpp"

namespace vpng {

// A model, its variational program and the flat parameter layout, bundled so
// the optimizer and the harness can pass one handle around.
struct Problem {
  std::shared_ptr<Model> model;
  std::shared_ptr<VariationalProgram> program;
  Layout layout;

  ParamVector init_eta(std::uint64_t seed) const;
};

Problem assemble_problem(std::shared_ptr<Model> model,
                         std::shared_ptr<VariationalProgram> program);

// 2-d conjugate Gaussian with the badly conditioned covariance
Problem make_toy_problem(double eps_corr, double sigma_q = 0.1);

// scalar linear-Gaussian model with the amortized q(z|x) = N(lambda*x, s^2)
Problem make_scalar_problem(double sigma_q, double init_lambda);

// Bayesian logistic regression; latent weights carry a learned mean-field q
Problem make_logreg_problem(int n_features = 4, double prior_sigma = 100.0,
                            double init_sigma = 0.1);

// Bernoulli-pixel VAE with the MLP encoder
Problem make_vae_problem(int pixels = 64, int latent = 10, int hidden = 32);

// Poisson matrix factorization: per-user latents, movie factors as theta
Problem make_pmf_problem(int n_users, int n_items, int latent);

}  // namespace vpng

#endif  // VPNG_PROBLEM_HPP_
