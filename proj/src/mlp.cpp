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

#include "vpng/mlp.hpp"

#include <cmath>

#include "vpng/errors.hpp"
#include "vpng/rng.hpp"

namespace vpng {

namespace {

using RowMajorMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                                   Eigen::Dynamic, Eigen::RowMajor>>;

}  // namespace

int Mlp::param_count() const {
  int n = 0;
  for (int l = 0; l < layers(); ++l) n += layer_param_count(l);
  return n;
}

int Mlp::layer_param_offset(int l) const {
  int n = 0;
  for (int i = 0; i < l; ++i) n += layer_param_count(i);
  return n;
}

void Mlp::forward(const Eigen::Ref<const Eigen::VectorXd>& params,
                  const Eigen::Ref<const Eigen::VectorXd>& x,
                  Eigen::Ref<Eigen::VectorXd> out, Ws* ws) const {
  require(params.size() == param_count(), "Mlp::forward: bad param size");
  require(x.size() == in_dim(), "Mlp::forward: bad input size");

  Eigen::VectorXd a = x;
  if (ws) {
    ws->acts.assign(layers() + 1, Eigen::VectorXd());
    ws->acts[0] = a;
  }
  int off = 0;
  for (int l = 0; l < layers(); ++l) {
    RowMajorMap W(params.data() + off, fan_out(l), fan_in(l));
    Eigen::VectorXd s = W * a;
    if (bias_) s += params.segment(off + fan_out(l) * fan_in(l), fan_out(l));
    off += layer_param_count(l);
    if (l + 1 < layers())
      a = s.array().tanh();
    else
      a = s;
    if (ws) ws->acts[l + 1] = a;
  }
  out = a;
}

void Mlp::backward(const Eigen::Ref<const Eigen::VectorXd>& params, const Ws& ws,
                   const Eigen::Ref<const Eigen::VectorXd>& dout,
                   Eigen::Ref<Eigen::VectorXd> dparams, Eigen::VectorXd* dx,
                   const LayerSink* sink) const {
  require(static_cast<int>(ws.acts.size()) == layers() + 1,
          "Mlp::backward: workspace from a different net");

  Eigen::VectorXd g = dout;  // dL/d(pre-activation of current layer)
  for (int l = layers() - 1; l >= 0; --l) {
    const int off = layer_param_offset(l);
    RowMajorMap W(params.data() + off, fan_out(l), fan_in(l));
    const Eigen::VectorXd& a = ws.acts[l];

    using RowMajorMutable =
        Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
    RowMajorMutable dW(dparams.data() + off, fan_out(l), fan_in(l));
    dW.noalias() += g * a.transpose();
    if (bias_) dparams.segment(off + fan_out(l) * fan_in(l), fan_out(l)) += g;

    if (sink) {
      LayerRecord& rec = (*sink->records)[sink->layer_base + l];
      if (bias_) {
        rec.a.resize(fan_in(l) + 1);
        rec.a << a, 1.0;
      } else {
        rec.a = a;
      }
      rec.g = g;
    }

    if (l == 0) {
      if (dx) *dx = W.transpose() * g;
      break;
    }
    // chain through tanh: ws.acts[l] is the post-activation input of layer l
    Eigen::VectorXd da = W.transpose() * g;
    g = da.array() * (1.0 - a.array().square());
  }
}

void Mlp::init_params(std::uint64_t seed, std::uint64_t unit,
                      Eigen::Ref<Eigen::VectorXd> params) const {
  int off = 0;
  for (int l = 0; l < layers(); ++l) {
    CounterRng rng(NoiseKey{seed, kInitStream, 0,
                            unit, static_cast<std::uint64_t>(l)});
    const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in(l)));
    for (int i = 0; i < fan_out(l) * fan_in(l); ++i)
      params[off + i] = scale * rng.normal();
    if (bias_)
      params.segment(off + fan_out(l) * fan_in(l), fan_out(l)).setZero();
    off += layer_param_count(l);
  }
}

}  // namespace vpng
