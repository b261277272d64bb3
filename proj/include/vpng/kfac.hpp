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

#ifndef VPNG_KFAC_HPP_
#define VPNG_KFAC_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "vpng/fisher.hpp"
#include "vpng/linalg.hpp"
#include "vpng/mlp.hpp"
#include "vpng/model.hpp"

namespace vpng {

// One affine layer of the stacked network, with its slice of eta.
struct LayerInfo {
  int fan_in = 0;   // inputs, bias not counted
  int fan_out = 0;
  bool bias = false;
  int param_offset = 0;  // start of the layer's slice in eta
  int param_count = 0;   // fan_out * (fan_in + bias)

  int a_dim() const { return fan_in + (bias ? 1 : 0); }
};

// The model/program pair viewed as one stacked feed-forward network:
// inference layers first, then generative layers. The reparameterization
// junction sits between the two groups; it has no parameters of its own, and
// its pathwise gradients d z / d (means, log-stddevs) reach the last
// inference layer through the program's pullback, so the lambda blocks get
// the same treatment as any other layer output.
struct NetworkView {
  std::vector<LayerInfo> layers;
  int n_encoder_layers = 0;

  int n_layers() const { return static_cast<int>(layers.size()); }
};

// Builds the view for a feed-forward model, with the program's inference net
// stacked in front when it has one. Throws NotFeedForward when the model has
// no layer decomposition (toy, logreg).
NetworkView stacked_network_view(const Model& model,
                                 const VariationalProgram& program,
                                 const Layout& layout);

// Per-layer Kronecker factors: A_l tracks input second moments (with the
// homogeneous bias coordinate), G_l tracks output-gradient second moments.
// Both are exponential moving averages over optimizer steps, started at zero
// and bias-corrected by 1/(1 - rho^t) when solving.
class KfacState {
 public:
  // data_scale carries the dataset-size factor of the Fisher (the factors
  // themselves are per-sample means); 1.0 reproduces the bare factored solve.
  KfacState(const NetworkView& view, double rho, double K,
            int lowrank_dim_threshold, double data_scale);

  int n_layers() const { return static_cast<int>(layers_.size()); }
  int steps() const { return steps_; }
  double rho() const { return rho_; }
  double data_scale() const { return data_scale_; }
  double truncation_k() const { return k_; }
  int lowrank_dim_threshold() const { return lowrank_dim_threshold_; }
  const LayerInfo& layer(int l) const { return layers_[l]; }
  const SymMatrix& factor_a(int l) const { return a_[l]; }
  const SymMatrix& factor_g(int l) const { return g_[l]; }

  // One EMA step from per-sample layer records. records holds n_samples
  // blocks of n_layers() entries each, sample-major (the layout LayerSink
  // produces when layer_base = sample * n_layers()).
  void update_factors(const std::vector<LayerRecord>& records, int n_samples);

 private:
  std::vector<LayerInfo> layers_;
  double rho_;
  double k_;
  int lowrank_dim_threshold_;
  double data_scale_;
  int steps_ = 0;
  std::vector<SymMatrix> a_;
  std::vector<SymMatrix> g_;
};

// Runs the b-hat backward passes of the vpng estimator with layer sinks
// attached and returns the records in the sample-major layout update_factors
// expects (n_samples = pred.size() * pred.mc_samples).
std::vector<LayerRecord> collect_predictive_records(
    const Model& model, const VariationalProgram& program, const Layout& layout,
    const ParamVector& eta, const PredictiveBatch& pred,
    const NetworkView& view);

// (scale*G_l + sqrt(mu) I)^-1 grad_l (scale*A_l + sqrt(mu) I)^-1 with
// scale = sqrt(data_scale) on each factor, matching the Kronecker identity
// (A (x) G)^-1 vec(V) = vec(G^-1 V A^-1) under the row-major layer layout.
// Factors larger than the low-rank threshold are truncated first; the
// truncated inverse is the pseudo-inverse of the kept pairs plus the
// sqrt(mu) shift on the discarded subspace (which needs mu > 0).
// grad_l is fan_out x a_dim, bias column last. Throws FactorsUninitialized
// before the first update.
Eigen::MatrixXd kfac_solve_layer(const KfacState& state, int l, double mu,
                                 const Eigen::MatrixXd& grad_l);

// All layers at once.
std::vector<Eigen::MatrixXd> kfac_solve(const KfacState& state, double mu,
                                        const std::vector<Eigen::MatrixXd>& grads);

// Full-eta convenience: slices grad per layer, solves, and falls back to
// grad/mu on coordinates no layer covers (per-datapoint variational
// parameters); those need mu > 0.
ParamVector kfac_direction(const KfacState& state, const NetworkView& view,
                           double mu, const ParamVector& grad);

// Trace of the factored curvature divided by its dimension, used to pick the
// automatic dampening level: sum_l data_scale * tr(A_l) * tr(G_l) / dim.
double kfac_mean_curvature(const KfacState& state, int dim);

}  // namespace vpng

#endif  // VPNG_KFAC_HPP_
