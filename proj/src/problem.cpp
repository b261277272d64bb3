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

#include "vpng/problem.hpp"

#include <utility>

#include "vpng/errors.hpp"
#include "vpng/models/logreg.hpp"
#include "vpng/models/mini_vae.hpp"
#include "vpng/models/poisson_mf.hpp"
#include "vpng/models/scalar_linear.hpp"
#include "vpng/models/toy_gaussian.hpp"

namespace vpng {

ParamVector Problem::init_eta(std::uint64_t seed) const {
  ParamVector eta = ParamVector::Zero(layout.dim());
  program->init_lambda(seed, eta.head(layout.lambda_dim()));
  model->init_theta(seed, eta.tail(layout.theta_dim()));
  return eta;
}

Problem assemble_problem(std::shared_ptr<Model> model,
                         std::shared_ptr<VariationalProgram> program) {
  require(model != nullptr && program != nullptr, "Problem: null parts");
  require(model->latent_dim() == program->latent_dim(),
          "Problem: model and program disagree on the latent dimension");
  Problem p;
  p.model = std::move(model);
  p.program = std::move(program);
  p.program->append_lambda_blocks(p.layout);
  p.layout.set_lambda_dim(p.program->lambda_dim());
  require(p.layout.dim() == p.program->lambda_dim(),
          "Problem: lambda blocks do not span lambda");
  p.model->append_theta_blocks(p.layout);
  require(p.layout.theta_dim() == p.model->theta_dim(),
          "Problem: theta blocks do not span theta");
  return p;
}

Problem make_toy_problem(double eps_corr, double sigma_q) {
  return assemble_problem(
      std::make_shared<ToyGaussianModel>(eps_corr),
      std::make_shared<GlobalMeanField>(2, /*learn_stddev=*/false, sigma_q));
}

Problem make_scalar_problem(double sigma_q, double init_lambda) {
  return assemble_problem(
      std::make_shared<ScalarLinearGaussianModel>(),
      std::make_shared<LinearAmortizedScalar>(sigma_q, init_lambda));
}

Problem make_logreg_problem(int n_features, double prior_sigma,
                            double init_sigma) {
  auto model = std::make_shared<LogRegModel>(n_features, prior_sigma);
  const int zd = model->latent_dim();
  return assemble_problem(
      std::move(model),
      std::make_shared<GlobalMeanField>(zd, /*learn_stddev=*/true, init_sigma));
}

Problem make_vae_problem(int pixels, int latent, int hidden) {
  return assemble_problem(std::make_shared<MiniVaeModel>(pixels, latent, hidden),
                          std::make_shared<MlpEncoder>(pixels, latent, hidden));
}

Problem make_pmf_problem(int n_users, int n_items, int latent) {
  return assemble_problem(
      std::make_shared<PoissonMFModel>(n_items, latent),
      std::make_shared<PerDatapointMeanField>(n_users, latent,
                                              /*init_sigma=*/0.1,
                                              /*init_mean_scale=*/0.1));
}

}  // namespace vpng
