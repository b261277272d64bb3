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
#include "vpng/mlp.hpp"
#include "vpng/rng.hpp"

using namespace vpng;

TEST_SUITE("mlp") {

TEST_CASE("parameter slicing: counts and offsets") {
  Mlp net({3, 5, 2}, true);
  CHECK(net.layers() == 2);
  CHECK(net.layer_param_count(0) == 5 * 4);
  CHECK(net.layer_param_count(1) == 2 * 6);
  CHECK(net.param_count() == 32);
  CHECK(net.layer_param_offset(0) == 0);
  CHECK(net.layer_param_offset(1) == 20);

  Mlp nb({3, 5, 2}, false);
  CHECK(nb.param_count() == 15 + 10);
}

TEST_CASE("a single affine layer computes W x + b") {
  Mlp net({2, 2}, true);
  Eigen::VectorXd params(6);
  // W = [[1, 2], [3, 4]] row-major, b = (10, 20)
  params << 1, 2, 3, 4, 10, 20;
  Eigen::VectorXd x(2);
  x << 1, -1;
  Eigen::VectorXd out(2);
  net.forward(params, x, out, nullptr);
  CHECK(out[0] == doctest::Approx(1 - 2 + 10));
  CHECK(out[1] == doctest::Approx(3 - 4 + 20));
}

TEST_CASE("hidden layers apply tanh, output layer stays affine") {
  Mlp net({1, 1, 1}, false);
  Eigen::VectorXd params(2);
  params << 2.0, 3.0;  // w0 = 2, w1 = 3
  Eigen::VectorXd x(1), out(1);
  x << 0.4;
  net.forward(params, x, out, nullptr);
  CHECK(out[0] == doctest::Approx(3.0 * std::tanh(0.8)).epsilon(1e-12));
}

TEST_CASE("backward gradient matches finite differences") {
  Mlp net({3, 4, 2}, true);
  Eigen::VectorXd params(net.param_count());
  net.init_params(7, 0, params);
  Eigen::VectorXd x(3);
  x << 0.3, -1.2, 0.8;
  Eigen::VectorXd w(2);
  w << 1.0, -2.0;  // fixed cotangent; loss = <w, net(x)>

  auto loss = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd out(2);
    net.forward(p, x, out, nullptr);
    return w.dot(out);
  };

  Mlp::Ws ws;
  Eigen::VectorXd out(2);
  net.forward(params, x, out, &ws);
  Eigen::VectorXd dparams = Eigen::VectorXd::Zero(net.param_count());
  Eigen::VectorXd dx(3);
  net.backward(params, ws, w, dparams, &dx, nullptr);

  Eigen::VectorXd fd = vpng_test::fd_gradient(loss, params, 1e-6);
  CHECK((dparams - fd).cwiseAbs().maxCoeff() < 1e-6);

  auto loss_x = [&](const Eigen::VectorXd& xin) {
    Eigen::VectorXd o(2);
    net.forward(params, xin, o, nullptr);
    return w.dot(o);
  };
  Eigen::VectorXd fdx = vpng_test::fd_gradient(loss_x, x, 1e-6);
  CHECK((dx - fdx).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("backward accumulates into dparams") {
  Mlp net({2, 2}, false);
  Eigen::VectorXd params(4);
  params << 1, 0, 0, 1;
  Eigen::VectorXd x(2), out(2), dout(2);
  x << 1, 2;
  dout << 1, 1;
  Mlp::Ws ws;
  net.forward(params, x, out, &ws);
  Eigen::VectorXd acc = Eigen::VectorXd::Constant(4, 100.0);
  net.backward(params, ws, dout, acc, nullptr, nullptr);
  // dW = dout x^T = [[1,2],[1,2]] added on top of 100
  CHECK(acc[0] == doctest::Approx(101.0));
  CHECK(acc[1] == doctest::Approx(102.0));
  CHECK(acc[2] == doctest::Approx(101.0));
  CHECK(acc[3] == doctest::Approx(102.0));
}

TEST_CASE("sink records activations with the homogeneous 1 and matching g") {
  Mlp net({2, 3, 1}, true);
  Eigen::VectorXd params(net.param_count());
  net.init_params(3, 1, params);
  Eigen::VectorXd x(2), out(1), dout(1);
  x << 0.5, -0.25;
  dout << 1.0;
  Mlp::Ws ws;
  net.forward(params, x, out, &ws);

  std::vector<LayerRecord> recs(2);
  LayerSink sink{&recs, 0};
  Eigen::VectorXd dparams = Eigen::VectorXd::Zero(net.param_count());
  net.backward(params, ws, dout, dparams, nullptr, &sink);

  REQUIRE(recs[0].a.size() == 3);  // 2 inputs + homogeneous 1
  CHECK(recs[0].a[0] == 0.5);
  CHECK(recs[0].a[1] == -0.25);
  CHECK(recs[0].a[2] == 1.0);
  REQUIRE(recs[1].a.size() == 4);
  CHECK(recs[1].a[3] == 1.0);
  REQUIRE(recs[1].g.size() == 1);
  CHECK(recs[1].g[0] == 1.0);  // identity output, cotangent passes through

  // outer products g a^T must reproduce the weight-and-bias gradient slices
  Eigen::MatrixXd og = recs[1].g * recs[1].a.transpose();
  for (int c = 0; c < 4; ++c)
    CHECK(og(0, c) ==
          doctest::Approx(dparams[net.layer_param_offset(1) + c]).epsilon(1e-12));
}

TEST_CASE("init_params is deterministic and leaves biases at zero") {
  Mlp net({4, 3}, true);
  Eigen::VectorXd p1(net.param_count()), p2(net.param_count());
  net.init_params(11, 2, p1);
  net.init_params(11, 2, p2);
  CHECK((p1 - p2).cwiseAbs().maxCoeff() == 0.0);
  CHECK(p1.tail(3).cwiseAbs().maxCoeff() == 0.0);
  CHECK(p1.head(12).cwiseAbs().maxCoeff() > 0.0);

  Eigen::VectorXd p3(net.param_count());
  net.init_params(12, 2, p3);
  CHECK((p1 - p3).cwiseAbs().maxCoeff() > 0.0);
}

}  // TEST_SUITE
