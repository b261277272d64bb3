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
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "vpng/dataset.hpp"
#include "vpng/kfac.hpp"
#include "vpng/problem.hpp"

using namespace vpng;

namespace {

NetworkView single_layer_view(int fan_in, int fan_out, bool bias) {
  LayerInfo li;
  li.fan_in = fan_in;
  li.fan_out = fan_out;
  li.bias = bias;
  li.param_offset = 0;
  li.param_count = fan_out * (fan_in + (bias ? 1 : 0));
  NetworkView v;
  v.layers.push_back(li);
  return v;
}

std::vector<LayerRecord> constant_records(const Eigen::VectorXd& a,
                                          const Eigen::VectorXd& g, int n) {
  std::vector<LayerRecord> recs(n);
  for (int i = 0; i < n; ++i) recs[i] = LayerRecord{a, g};
  return recs;
}

// row-major vec of a layer gradient matrix
Eigen::VectorXd vec_row(const Eigen::MatrixXd& m) {
  Eigen::VectorXd out(m.size());
  int at = 0;
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) out[at++] = m(r, c);
  return out;
}

}  // namespace

TEST_SUITE("kfac") {

TEST_CASE("stacked view covers eta exactly for the vae problem") {
  Problem p = make_vae_problem(64, 10, 32);
  NetworkView v = stacked_network_view(*p.model, *p.program, p.layout);
  REQUIRE(v.n_layers() == 6);
  REQUIRE(v.n_encoder_layers == 3);

  // encoder: 64 -> 32 -> 32 -> 20 (means and log-stddevs), with bias
  CHECK(v.layers[0].fan_in == 64);
  CHECK(v.layers[0].fan_out == 32);
  CHECK(v.layers[2].fan_out == 20);
  // decoder: 10 -> 32 -> 32 -> 64
  CHECK(v.layers[3].fan_in == 10);
  CHECK(v.layers[5].fan_out == 64);

  // slices tile [0, dim) without gaps, lambda first
  int expect_off = 0;
  for (const auto& li : v.layers) {
    CHECK(li.param_offset == expect_off);
    CHECK(li.param_count == li.fan_out * li.a_dim());
    expect_off += li.param_count;
  }
  CHECK(expect_off == p.layout.dim());
  CHECK(v.layers[3].param_offset == p.layout.lambda_dim());
}

TEST_CASE("stacked view for poisson mf is the single bias-free item layer") {
  Problem p = make_pmf_problem(5, 7, 3);
  NetworkView v = stacked_network_view(*p.model, *p.program, p.layout);
  REQUIRE(v.n_layers() == 1);
  CHECK(v.n_encoder_layers == 0);
  CHECK(v.layers[0].fan_in == 3);
  CHECK(v.layers[0].fan_out == 7);
  CHECK(!v.layers[0].bias);
  CHECK(v.layers[0].param_offset == p.layout.lambda_dim());
  CHECK(v.layers[0].param_count == 21);
}

TEST_CASE("models without a layer decomposition are rejected") {
  Problem toy = make_toy_problem(0.1);
  CHECK_THROWS_AS(stacked_network_view(*toy.model, *toy.program, toy.layout),
                  NotFeedForward);
}

TEST_CASE("update_factors: first step stores (1 - rho) times the batch moment") {
  NetworkView v = single_layer_view(2, 1, false);
  KfacState st(v, 0.9, 8.0, 128, 1.0);
  CHECK(st.steps() == 0);

  Eigen::VectorXd a(2), g(1);
  a << 1.0, 2.0;
  g << 3.0;
  st.update_factors(constant_records(a, g, 4), 4);
  CHECK(st.steps() == 1);
  // mean(a a^T) = [[1,2],[2,4]], scaled by (1 - rho)
  CHECK(st.factor_a(0)(0, 0) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(st.factor_a(0)(0, 1) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(st.factor_a(0)(1, 1) == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(st.factor_g(0)(0, 0) == doctest::Approx(0.9).epsilon(1e-14));
}

TEST_CASE("update_factors follows the geometric series of the EMA") {
  NetworkView v = single_layer_view(2, 2, false);
  const double rho = 0.6;
  KfacState st(v, rho, 8.0, 128, 1.0);

  Eigen::VectorXd a0(2), g0(2);
  a0 << 1.0, -1.0;
  g0 << 0.5, 2.0;
  st.update_factors(constant_records(a0, g0, 1), 1);
  const Eigen::MatrixXd a1 = st.factor_a(0).dense();  // (1 - rho) a0 a0^T

  Eigen::VectorXd ac(2), gc(2);
  ac << 2.0, 0.5;
  gc << -1.0, 1.0;
  for (int t = 0; t < 3; ++t) st.update_factors(constant_records(ac, gc, 3), 3);
  CHECK(st.steps() == 4);

  const Eigen::MatrixXd cc = ac * ac.transpose();
  const Eigen::MatrixXd expect =
      (1.0 - std::pow(rho, 3)) * cc + std::pow(rho, 3) * a1;
  CHECK((st.factor_a(0).dense() - expect).cwiseAbs().maxCoeff() < 1e-12);

  const Eigen::MatrixXd gg = gc * gc.transpose();
  const Eigen::MatrixXd gexpect =
      (1.0 - std::pow(rho, 3)) * gg +
      std::pow(rho, 3) * (1.0 - rho) * (g0 * g0.transpose());
  CHECK((st.factor_g(0).dense() - gexpect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("rho = 0 keeps exactly the latest batch moments") {
  NetworkView v = single_layer_view(2, 1, false);
  KfacState st(v, 0.0, 8.0, 128, 1.0);
  Eigen::VectorXd a(2), g(1);
  a << 3.0, 0.0;
  g << 1.0;
  st.update_factors(constant_records(a, g, 2), 2);
  a << 0.0, 2.0;
  st.update_factors(constant_records(a, g, 2), 2);
  CHECK(st.factor_a(0)(0, 0) == 0.0);
  CHECK(st.factor_a(0)(1, 1) == 4.0);
}

TEST_CASE("solving before any update throws FactorsUninitialized") {
  NetworkView v = single_layer_view(2, 2, false);
  KfacState st(v, 0.9, 8.0, 128, 1.0);
  Eigen::MatrixXd grad = Eigen::MatrixXd::Ones(2, 2);
  CHECK_THROWS_AS(kfac_solve_layer(st, 0, 0.1, grad), FactorsUninitialized);
  CHECK_THROWS_AS(kfac_mean_curvature(st, 4), FactorsUninitialized);
}

TEST_CASE("identity factors with mu = 0 return the gradient") {
  // two samples with sqrt(2)-scaled basis vectors make the batch second
  // moments exactly the identity
  NetworkView v = single_layer_view(2, 2, false);
  KfacState st(v, 0.5, 8.0, 128, 1.0);
  std::vector<LayerRecord> recs(2);
  Eigen::VectorXd e0(2), e1(2);
  e0 << std::sqrt(2.0), 0.0;
  e1 << 0.0, std::sqrt(2.0);
  recs[0] = LayerRecord{e0, e0};
  recs[1] = LayerRecord{e1, e1};
  st.update_factors(recs, 2);

  Eigen::MatrixXd grad(2, 2);
  grad << 1.0, -2.0, 0.5, 4.0;
  Eigen::MatrixXd dir = kfac_solve_layer(st, 0, 0.0, grad);
  CHECK((dir - grad).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("factored solve matches the dense Kronecker solve") {
  // G-side records run over a scaled basis so mean(g g^T) = I exactly; the
  // kfac matrix is then I (x) A and the dense solve is tractable to write
  // down independently
  const int fan_out = 4, fan_in = 2;
  NetworkView v = single_layer_view(fan_in, fan_out, false);
  const double s = 3.0;  // data scale
  KfacState st(v, 0.3, 8.0, 128, s);

  CounterRng rng(NoiseKey{51, kTestStream, 0, 0, 0});
  std::vector<LayerRecord> recs(fan_out);
  Eigen::MatrixXd amean = Eigen::MatrixXd::Zero(fan_in, fan_in);
  for (int k = 0; k < fan_out; ++k) {
    Eigen::VectorXd a(fan_in), g(fan_out);
    rng.fill_normal(a);
    g.setZero();
    g[k] = 2.0;  // sqrt(fan_out)
    recs[k] = LayerRecord{a, g};
    amean += a * a.transpose() / fan_out;
  }
  st.update_factors(recs, fan_out);

  Eigen::MatrixXd grad(fan_out, fan_in);
  for (int r = 0; r < fan_out; ++r)
    for (int c = 0; c < fan_in; ++c) grad(r, c) = rng.normal();

  for (double mu : {0.0, 0.2}) {
    Eigen::MatrixXd dir = kfac_solve_layer(st, 0, mu, grad);

    // dense counterpart: (s * I (x) A + sqrt(mu)-shifted factors) under the
    // row-major vec; with G = I the matrix is block diagonal in the rows
    const double gmu = std::sqrt(mu);
    Eigen::MatrixXd af = std::sqrt(s) * amean +
                         gmu * Eigen::MatrixXd::Identity(fan_in, fan_in);
    Eigen::MatrixXd gf = std::sqrt(s) * Eigen::MatrixXd::Identity(fan_out, fan_out);
    gf.diagonal().array() += gmu;
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(grad.size(), grad.size());
    for (int r = 0; r < fan_out; ++r)
      dense.block(r * fan_in, r * fan_in, fan_in, fan_in) = gf(r, r) * af;
    Eigen::VectorXd ref = vpng_test::gauss_solve(dense, vec_row(grad));
    CHECK((vec_row(dir) - ref).cwiseAbs().maxCoeff() <
          1e-8 * (1.0 + ref.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("low-rank truncation path agrees at full retained rank") {
  const int dim = 6;
  NetworkView v = single_layer_view(dim, 2, false);
  CounterRng rng(NoiseKey{53, kTestStream, 0, 0, 0});
  std::vector<LayerRecord> recs(12);
  for (auto& r : recs) {
    r.a.resize(dim);
    r.g.resize(2);
    rng.fill_normal(r.a);
    rng.fill_normal(r.g);
  }
  Eigen::MatrixXd grad(2, dim);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < dim; ++c) grad(r, c) = rng.normal();

  // threshold 1 forces truncation; K = 8 keeps ceil(8 ln 6) = 15 >= 6 pairs,
  // so nothing is actually dropped and the answers must match
  KfacState full(v, 0.5, 8.0, 128, 2.0);
  KfacState trunc(v, 0.5, 8.0, 1, 2.0);
  full.update_factors(recs, 12);
  trunc.update_factors(recs, 12);
  for (double mu : {0.0, 0.3}) {
    Eigen::MatrixXd a = kfac_solve_layer(full, 0, mu, grad);
    Eigen::MatrixXd b = kfac_solve_layer(trunc, 0, mu, grad);
    CHECK((a - b).cwiseAbs().maxCoeff() <
          1e-8 * (1.0 + a.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("truncated solve needs damping when pairs are dropped") {
  const int dim = 9;
  NetworkView v = single_layer_view(dim, 2, false);
  // K = 0.5 keeps ceil(0.5 ln 9) = 2 of 9 pairs
  KfacState st(v, 0.5, 0.5, 1, 1.0);
  CounterRng rng(NoiseKey{57, kTestStream, 0, 0, 0});
  std::vector<LayerRecord> recs(30);
  for (auto& r : recs) {
    r.a.resize(dim);
    r.g.resize(2);
    rng.fill_normal(r.a);
    rng.fill_normal(r.g);
  }
  st.update_factors(recs, 30);

  Eigen::MatrixXd grad = Eigen::MatrixXd::Ones(2, dim);
  CHECK_THROWS_AS(kfac_solve_layer(st, 0, 0.0, grad), SingularSystem);
  Eigen::MatrixXd dir = kfac_solve_layer(st, 0, 0.4, grad);
  CHECK(dir.allFinite());
  // the solve of a PD system keeps a positive inner product with the grad
  CHECK((dir.array() * grad.array()).sum() > 0.0);
}

TEST_CASE("directions keep a positive inner product with the gradient") {
  NetworkView v = single_layer_view(3, 2, true);
  CounterRng rng(NoiseKey{59, kTestStream, 0, 0, 0});
  for (int trial = 0; trial < 100; ++trial) {
    KfacState st(v, 0.8, 8.0, 128, 1.0 + 10.0 * rng.uniform());
    const int n = 5;
    std::vector<LayerRecord> recs(n);
    for (auto& r : recs) {
      r.a.resize(4);  // fan_in + homogeneous 1
      r.g.resize(2);
      rng.fill_normal(r.a);
      r.a[3] = 1.0;
      rng.fill_normal(r.g);
    }
    st.update_factors(recs, n);
    Eigen::MatrixXd grad(2, 4);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 4; ++c) grad(r, c) = rng.normal();
    const double mu = 0.05 + rng.uniform();
    Eigen::MatrixXd dir = kfac_solve_layer(st, 0, mu, grad);
    CHECK((dir.array() * grad.array()).sum() > 0.0);
  }
}

TEST_CASE("kfac_mean_curvature is the factored trace over the dimension") {
  NetworkView v = single_layer_view(2, 2, false);
  const double s = 5.0;
  KfacState st(v, 0.5, 8.0, 128, s);
  Eigen::VectorXd a(2), g(2);
  a << 1.0, 1.0;
  g << 2.0, 0.0;
  st.update_factors(constant_records(a, g, 2), 2);
  // corrected traces: tr(A) = 2, tr(G) = 4; dim 4
  CHECK(kfac_mean_curvature(st, 4) ==
        doctest::Approx(s * 2.0 * 4.0 / 4.0).epsilon(1e-12));
}

TEST_CASE("kfac_direction falls back to grad / mu off the covered slices") {
  Problem p = make_pmf_problem(3, 4, 2);
  NetworkView v = stacked_network_view(*p.model, *p.program, p.layout);
  KfacState st(v, 0.5, 8.0, 128, 1.0);
  CounterRng rng(NoiseKey{61, kTestStream, 0, 0, 0});
  std::vector<LayerRecord> recs(6);
  for (auto& r : recs) {
    r.a.resize(2);
    r.g.resize(4);
    rng.fill_normal(r.a);
    rng.fill_normal(r.g);
  }
  st.update_factors(recs, 6);

  ParamVector grad(p.layout.dim());
  rng.fill_normal(grad);
  const int L = p.layout.lambda_dim();

  CHECK_THROWS_AS(kfac_direction(st, v, 0.0, grad), Error);
  ParamVector dir = kfac_direction(st, v, 0.5, grad);
  CHECK((dir.head(L) - grad.head(L) / 0.5).cwiseAbs().maxCoeff() < 1e-14);
  // covered block solved against the factors, not the scalar fallback
  Eigen::MatrixXd gtheta(4, 2);
  int at = L;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 2; ++c) gtheta(r, c) = grad[at++];
  Eigen::MatrixXd dtheta = kfac_solve_layer(st, 0, 0.5, gtheta);
  at = L;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 2; ++c) CHECK(dir[at++] == dtheta(r, c));
}

TEST_CASE("collect_predictive_records matches the dense estimator blockwise") {
  // the poisson model is a single linear layer, so each record's g a^T must
  // flatten to exactly the theta slice of the corresponding b vector; the
  // reassembled theta block of the Fisher then matches the dense estimate
  Problem p = make_pmf_problem(4, 3, 2);
  Eigen::MatrixXd ratings = gen_ratings_matrix(4, 3, 2, 9);
  ParamVector eta = p.init_eta(4);
  SeedCtx ctx{63, 2};
  const int M = 3;
  PredictiveBatch pred = sample_predictive_batch(
      *p.model, *p.program, p.layout, eta, Batch::all(ratings), M, ctx);
  NetworkView v = stacked_network_view(*p.model, *p.program, p.layout);
  std::vector<LayerRecord> recs =
      collect_predictive_records(*p.model, *p.program, p.layout, eta, pred, v);
  REQUIRE(recs.size() == static_cast<size_t>(4 * M * v.n_layers()));

  FisherEstimate dense =
      estimate_vpng_fisher(*p.model, *p.program, p.layout, eta, pred);
  const int L = p.layout.lambda_dim();
  const int T = p.layout.theta_dim();
  Eigen::MatrixXd rebuilt = Eigen::MatrixXd::Zero(T, T);
  for (const auto& r : recs) {
    Eigen::VectorXd b = vec_row(r.g * r.a.transpose());
    rebuilt += (pred.scale() / M) * b * b.transpose();
  }
  Eigen::MatrixXd ref = dense.matrix.dense().block(L, L, T, T);
  CHECK((rebuilt - ref).cwiseAbs().maxCoeff() <
        1e-10 * (1.0 + ref.cwiseAbs().maxCoeff()));
}

TEST_CASE("collected vae records have the stacked shapes") {
  Problem p = make_vae_problem(6, 2, 4);
  Eigen::MatrixXd imgs(2, 6);
  imgs << 1, 0, 1, 0, 0, 1,
          0, 1, 0, 1, 1, 0;
  ParamVector eta = p.init_eta(8);
  PredictiveBatch pred = sample_predictive_batch(
      *p.model, *p.program, p.layout, eta, Batch::all(imgs), 2, SeedCtx{65, 1});
  NetworkView v = stacked_network_view(*p.model, *p.program, p.layout);
  std::vector<LayerRecord> recs =
      collect_predictive_records(*p.model, *p.program, p.layout, eta, pred, v);
  REQUIRE(recs.size() == static_cast<size_t>(2 * 2 * v.n_layers()));
  for (int s = 0; s < 4; ++s) {
    for (int l = 0; l < v.n_layers(); ++l) {
      const LayerRecord& r = recs[s * v.n_layers() + l];
      REQUIRE(r.a.size() == v.layers[l].a_dim());
      REQUIRE(r.g.size() == v.layers[l].fan_out);
      CHECK(r.a[v.layers[l].a_dim() - 1] == 1.0);  // homogeneous coordinate
    }
  }
  // factors built from them are PSD
  KfacState st(v, 0.9, 8.0, 128, 1.0);
  st.update_factors(recs, 4);
  for (int l = 0; l < v.n_layers(); ++l) {
    CHECK(vpng_test::jacobi_min_eigenvalue(st.factor_a(l).dense()) > -1e-10);
    CHECK(vpng_test::jacobi_min_eigenvalue(st.factor_g(l).dense()) > -1e-10);
  }
}

}  // TEST_SUITE
