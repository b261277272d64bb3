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

#include "doctest.h"
#include "vpng/layout.hpp"
#include "vpng/problem.hpp"

using namespace vpng;

TEST_SUITE("layout") {

TEST_CASE("blocks are laid out contiguously in insertion order") {
  Layout l;
  CHECK(l.add("lambda.means", 3) == 0);
  CHECK(l.add("lambda.log_stddevs", 3) == 3);
  l.set_lambda_dim(6);
  CHECK(l.add("theta.w", 4) == 6);
  CHECK(l.dim() == 10);
  CHECK(l.lambda_dim() == 6);
  CHECK(l.theta_dim() == 4);
  CHECK(l.block("theta.w").offset == 6);
  CHECK(l.block("theta.w").size == 4);
  CHECK(l.has_block("lambda.means"));
  CHECK(!l.has_block("nope"));
  CHECK_THROWS_AS(l.block("nope"), Error);
}

TEST_CASE("slices view the right coordinates and write through") {
  Layout l;
  l.add("lambda.means", 2);
  l.set_lambda_dim(2);
  l.add("theta.w", 3);
  ParamVector v(5);
  v << 1, 2, 3, 4, 5;
  CHECK(l.lambda(v).sum() == 3.0);
  CHECK(l.theta(v).sum() == 12.0);
  l.slice(v, "theta.w")[1] = 40.0;
  CHECK(v[3] == 40.0);

  ParamVector wrong(4);
  CHECK_THROWS_AS(l.lambda(wrong), DimensionMismatch);
}

TEST_CASE("assembled problems cover eta exactly with lambda first") {
  Problem toy = make_toy_problem(0.01);
  CHECK(toy.layout.lambda_dim() == 2);
  CHECK(toy.layout.theta_dim() == 0);
  CHECK(toy.layout.dim() == 2);
  CHECK(toy.layout.block("lambda.means").offset == 0);

  Problem lr = make_logreg_problem();
  // 4 features + bias, mean-field with learned stddevs
  CHECK(lr.layout.lambda_dim() == 10);
  CHECK(lr.layout.theta_dim() == 0);
  CHECK(lr.layout.block("lambda.log_stddevs").offset == 5);

  Problem vae = make_vae_problem(64, 10, 32);
  const int enc = vae.program->lambda_dim();
  const int dec = vae.model->theta_dim();
  CHECK(vae.layout.dim() == enc + dec);
  CHECK(vae.layout.lambda_dim() == enc);
  CHECK(vae.layout.theta_dim() == dec);

  Problem pmf = make_pmf_problem(12, 7, 3);
  CHECK(pmf.layout.lambda_dim() == 2 * 12 * 3);
  CHECK(pmf.layout.theta_dim() == 7 * 3);
}

TEST_CASE("init_eta is deterministic in the seed") {
  Problem vae = make_vae_problem(16, 4, 8);
  ParamVector a = vae.init_eta(3);
  ParamVector b = vae.init_eta(3);
  ParamVector c = vae.init_eta(4);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a - c).cwiseAbs().maxCoeff() > 0.0);
  CHECK(a.allFinite());
}

}  // TEST_SUITE
