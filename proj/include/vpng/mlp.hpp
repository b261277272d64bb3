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

#ifndef VPNG_MLP_HPP_
#define VPNG_MLP_HPP_

#include <vector>

#include <Eigen/Dense>

namespace vpng {

// One (input activation, pre-activation gradient) pair from a backward pass.
// The activation carries the trailing homogeneous 1 when the layer has a bias,
// so the Kronecker factors can treat weights and bias uniformly.
struct LayerRecord {
  Eigen::VectorXd a;  // fan_in (+1 with bias)
  Eigen::VectorXd g;  // fan_out
};

// Per-sample sink: slot `layer_base + l` receives layer l's record.
struct LayerSink {
  std::vector<LayerRecord>* records = nullptr;
  int layer_base = 0;
};

// Small dense net: affine -> tanh -> ... -> affine (identity at the output).
// Parameters are a flat slice: per layer, W (fan_out x fan_in) row-major,
// then the bias. No allocation tricks; everything is desk scale.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::vector<int> dims, bool bias) : dims_(std::move(dims)), bias_(bias) {}

  int layers() const { return static_cast<int>(dims_.size()) - 1; }
  int in_dim() const { return dims_.front(); }
  int out_dim() const { return dims_.back(); }
  int fan_in(int l) const { return dims_[l]; }
  int fan_out(int l) const { return dims_[l + 1]; }
  bool bias() const { return bias_; }
  int layer_param_count(int l) const {
    return fan_out(l) * (fan_in(l) + (bias_ ? 1 : 0));
  }
  int param_count() const;
  int layer_param_offset(int l) const;

  struct Ws {
    std::vector<Eigen::VectorXd> acts;  // acts[l] = input of layer l; size layers()+1
  };

  void forward(const Eigen::Ref<const Eigen::VectorXd>& params,
               const Eigen::Ref<const Eigen::VectorXd>& x,
               Eigen::Ref<Eigen::VectorXd> out, Ws* ws) const;

  // Accumulates dL/dparams into dparams (+=). dx, when non-null, receives
  // dL/dx (overwritten). sink, when non-null, records per-layer (a, g).
  void backward(const Eigen::Ref<const Eigen::VectorXd>& params, const Ws& ws,
                const Eigen::Ref<const Eigen::VectorXd>& dout,
                Eigen::Ref<Eigen::VectorXd> dparams, Eigen::VectorXd* dx,
                const LayerSink* sink) const;

  // fan-in scaled Gaussian init, biases zero
  void init_params(std::uint64_t seed, std::uint64_t unit,
                   Eigen::Ref<Eigen::VectorXd> params) const;

 private:
  std::vector<int> dims_;
  bool bias_ = true;
};

}  // namespace vpng

#endif  // VPNG_MLP_HPP_
