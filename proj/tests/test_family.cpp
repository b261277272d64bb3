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

#include <cmath>
#include <memory>

#include "doctest.h"
#include "oracles.hpp"
#include "vpng/family.hpp"
#include "vpng/models/mini_vae.hpp"
#include "vpng/models/scalar_linear.hpp"

using namespace vpng;

namespace {

MeanFieldGaussian make_q(bool learn) {
  MeanFieldGaussian q;
  q.means.resize(3);
  q.means << 0.5, -1.0, 2.0;
  q.stddevs.resize(3);
  q.stddevs << 0.1, 1.0, 3.0;
  q.learn_stddev = learn;
  return q;
}

}  // namespace

TEST_SUITE("family") {

TEST_CASE("reparameterize is mean + stddev * eps") {
  MeanFieldGaussian q = make_q(false);
  NoiseDraw eps = NoiseDraw::make(NoiseKey{1, kTestStream, 0, 0, 0}, 3);
  Eigen::VectorXd z = reparameterize(q, eps);
  for (int i = 0; i < 3; ++i)
    CHECK(z[i] == doctest::Approx(q.means[i] + q.stddevs[i] * eps.values[i])
                      .epsilon(1e-15));
}

TEST_CASE("pullback_to_lambda chains means and stddevs correctly") {
  NoiseDraw eps = NoiseDraw::make(NoiseKey{2, kTestStream, 0, 0, 0}, 3);
  Eigen::VectorXd gz(3);
  gz << 1.0, -2.0, 0.5;

  MeanFieldGaussian fixed = make_q(false);
  Eigen::VectorXd gm = pullback_to_lambda(fixed, eps, gz);
  REQUIRE(gm.size() == 3);
  CHECK((gm - gz).cwiseAbs().maxCoeff() == 0.0);  // dz/dmean = I

  MeanFieldGaussian learned = make_q(true);
  Eigen::VectorXd gms = pullback_to_lambda(learned, eps, gz);
  REQUIRE(gms.size() == 6);
  CHECK((gms.head(3) - gz).cwiseAbs().maxCoeff() == 0.0);
  for (int i = 0; i < 3; ++i)  // dz/dstddev = eps
    CHECK(gms[3 + i] == doctest::Approx(gz[i] * eps.values[i]).epsilon(1e-15));
}

TEST_CASE("kl_to_standard_normal closed form") {
  MeanFieldGaussian q;
  q.means.resize(1);
  q.stddevs.resize(1);
  q.means << 0.0;
  q.stddevs << 1.0;
  CHECK(kl_to_standard_normal(q) == doctest::Approx(0.0).epsilon(1e-15));

  q.means << 2.0;
  q.stddevs << 0.5;
  // 0.5*(4 + 0.25 - 1) - ln 0.5
  CHECK(kl_to_standard_normal(q) ==
        doctest::Approx(0.5 * 3.25 + std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("q_fisher diagonal in (mean, stddev) coordinates") {
  MeanFieldGaussian q = make_q(true);
  SymMatrix f = q_fisher(q);
  REQUIRE(f.dim() == 6);
  for (int i = 0; i < 3; ++i) {
    CHECK(f(i, i) == doctest::Approx(1.0 / (q.stddevs[i] * q.stddevs[i])));
    CHECK(f(3 + i, 3 + i) ==
          doctest::Approx(2.0 / (q.stddevs[i] * q.stddevs[i])));
  }
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      if (i != j) CHECK(f(i, j) == 0.0);
}

TEST_CASE("GlobalMeanField: init, local, diagonal Fisher in layout coords") {
  GlobalMeanField prog(2, true, 0.3);
  REQUIRE(prog.lambda_dim() == 4);
  Eigen::VectorXd lambda(4);
  prog.init_lambda(0, lambda);
  CHECK(lambda.head(2).cwiseAbs().maxCoeff() == 0.0);
  CHECK(lambda[2] == doctest::Approx(std::log(0.3)).epsilon(1e-12));

  lambda << 0.7, -0.2, std::log(0.5), std::log(2.0);
  Eigen::VectorXd x(1);  // ignored by a global program
  MeanFieldGaussian q = prog.local(x, 0, lambda);
  CHECK(q.means[0] == 0.7);
  CHECK(q.stddevs[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(q.stddevs[1] == doctest::Approx(2.0).epsilon(1e-12));

  // layout-coordinate q-Fisher: 1/s^2 over means, constant 2 over log-stddevs
  Eigen::VectorXd diag;
  REQUIRE(prog.q_fisher_diag(lambda, diag));
  REQUIRE(diag.size() == 4);
  CHECK(diag[0] == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(diag[1] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(diag[2] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(diag[3] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("GlobalMeanField pullback matches finite differences of z(lambda)") {
  GlobalMeanField prog(2, true, 0.3);
  Eigen::VectorXd lambda(4);
  lambda << 0.7, -0.2, std::log(0.5), std::log(2.0);
  NoiseDraw eps = NoiseDraw::make(NoiseKey{4, kTestStream, 0, 0, 0}, 2);
  Eigen::VectorXd w(2);
  w << 1.0, -0.5;  // loss = <w, z(lambda)>
  Eigen::VectorXd x(1);

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(4);
  prog.pullback(x, 0, lambda, eps.values, w, grad, nullptr);

  auto loss = [&](const Eigen::VectorXd& l) {
    MeanFieldGaussian q = prog.local(x, 0, l);
    Eigen::VectorXd z = q.means + q.stddevs.cwiseProduct(eps.values);
    return w.dot(z);
  };
  Eigen::VectorXd fd = vpng_test::fd_gradient(loss, lambda, 1e-6);
  CHECK((grad - fd).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("GlobalMeanField KL and its gradient against the closed form") {
  GlobalMeanField prog(2, false, 0.25);
  Eigen::VectorXd lambda(2);
  lambda << 1.0, -2.0;
  Eigen::VectorXd x(1);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(2);
  const double kl = prog.kl_to_prior(x, 0, lambda, 1.0, 1.0, grad);
  // fixed stddev 0.25: KL = sum 0.5*(m^2 + s^2 - 1) - ln s
  const double expect =
      0.5 * (1.0 + 0.0625 - 1.0) - std::log(0.25) +
      0.5 * (4.0 + 0.0625 - 1.0) - std::log(0.25);
  CHECK(kl == doctest::Approx(expect).epsilon(1e-12));
  CHECK(grad[0] == doctest::Approx(1.0).epsilon(1e-12));  // dKL/dm = m
  CHECK(grad[1] == doctest::Approx(-2.0).epsilon(1e-12));

  // wider prior: KL(N(m, s^2) || N(0, sig^2)) gradient is m / sig^2
  Eigen::VectorXd grad2 = Eigen::VectorXd::Zero(2);
  prog.kl_to_prior(x, 0, lambda, 2.0, 1.0, grad2);
  CHECK(grad2[0] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("PerDatapointMeanField addresses one row per datapoint") {
  PerDatapointMeanField prog(4, 2, 0.1, 0.0);
  REQUIRE(prog.lambda_dim() == 16);
  Eigen::VectorXd lambda(16);
  prog.init_lambda(0, lambda);
  for (int i = 0; i < 8; ++i)
    CHECK(lambda[8 + i] == doctest::Approx(std::log(0.1)).epsilon(1e-12));

  lambda.head(8) << 1, 2, 3, 4, 5, 6, 7, 8;
  Eigen::VectorXd x(1);
  MeanFieldGaussian q2 = prog.local(x, 2, lambda);
  CHECK(q2.means[0] == 5.0);
  CHECK(q2.means[1] == 6.0);

  // pullback writes only datapoint 2's coordinates
  NoiseDraw eps = NoiseDraw::make(NoiseKey{5, kTestStream, 0, 0, 0}, 2);
  Eigen::VectorXd gz(2);
  gz << 1.0, 1.0;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(16);
  prog.pullback(x, 2, lambda, eps.values, gz, grad, nullptr);
  for (int i = 0; i < 16; ++i) {
    const bool touched = (i == 4 || i == 5 || i == 12 || i == 13);
    if (!touched) CHECK(grad[i] == 0.0);
  }
  CHECK(grad[4] == 1.0);
  CHECK(grad[5] == 1.0);
}

TEST_CASE("PerDatapointMeanField KL sums only the addressed point") {
  PerDatapointMeanField prog(3, 1, 1.0, 0.0);
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(6);
  lambda[1] = 3.0;  // mean of datapoint 1
  Eigen::VectorXd x(1);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(6);
  const double kl = prog.kl_to_prior(x, 1, lambda, 1.0, 1.0, grad);
  CHECK(kl == doctest::Approx(4.5).epsilon(1e-12));  // 0.5 * 3^2
  CHECK(grad[1] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(grad[0] == 0.0);
  CHECK(grad[2] == 0.0);
}

TEST_CASE("MlpEncoder pullback matches finite differences through the net") {
  MlpEncoder enc(6, 2, 5);
  const int L = enc.lambda_dim();
  Eigen::VectorXd lambda(L);
  enc.init_lambda(9, lambda);
  Eigen::VectorXd x(6);
  x << 1, 0, 1, 1, 0, 0;
  NoiseDraw eps = NoiseDraw::make(NoiseKey{6, kTestStream, 0, 0, 0}, 2);
  Eigen::VectorXd w(2);
  w << 0.8, -1.1;

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(L);
  enc.pullback(x, 0, lambda, eps.values, w, grad, nullptr);

  auto loss = [&](const Eigen::VectorXd& l) {
    MeanFieldGaussian q = enc.local(x, 0, l);
    Eigen::VectorXd z = q.means + q.stddevs.cwiseProduct(eps.values);
    return w.dot(z);
  };
  Eigen::VectorXd fd = vpng_test::fd_gradient(loss, lambda, 1e-5);
  CHECK((grad - fd).cwiseAbs().maxCoeff() < 2e-6);

  // no diagonal family Fisher for an amortized program
  Eigen::VectorXd diag;
  CHECK(!enc.q_fisher_diag(lambda, diag));
}

TEST_CASE("MlpEncoder KL gradient matches finite differences") {
  MlpEncoder enc(4, 2, 3);
  const int L = enc.lambda_dim();
  Eigen::VectorXd lambda(L);
  enc.init_lambda(10, lambda);
  Eigen::VectorXd x(4);
  x << 0, 1, 1, 0;

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(L);
  const double kl = enc.kl_to_prior(x, 0, lambda, 1.0, 1.0, grad);
  CHECK(kl >= 0.0);

  auto klf = [&](const Eigen::VectorXd& l) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(L);
    return enc.kl_to_prior(x, 0, l, 1.0, 0.0, g);
  };
  Eigen::VectorXd fd = vpng_test::fd_gradient(klf, lambda, 1e-5);
  CHECK((grad - fd).cwiseAbs().maxCoeff() < 2e-6);
}

TEST_CASE("LinearAmortizedScalar ties q mean to lambda * x") {
  LinearAmortizedScalar prog(0.7, 0.4);
  Eigen::VectorXd lambda(1);
  prog.init_lambda(0, lambda);
  CHECK(lambda[0] == 0.4);
  Eigen::VectorXd x(1);
  x << -2.0;
  MeanFieldGaussian q = prog.local(x, 0, lambda);
  CHECK(q.means[0] == doctest::Approx(-0.8).epsilon(1e-12));
  CHECK(q.stddevs[0] == 0.7);

  NoiseDraw eps = NoiseDraw::make(NoiseKey{7, kTestStream, 0, 0, 0}, 1);
  Eigen::VectorXd gz(1);
  gz << 1.5;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(1);
  prog.pullback(x, 0, lambda, eps.values, gz, grad, nullptr);
  CHECK(grad[0] == doctest::Approx(1.5 * -2.0).epsilon(1e-12));  // dz/dlambda = x
}

}  // TEST_SUITE
