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

#include "vpng/kfac.hpp"

#include <cmath>
#include <utility>

#include "vpng/errors.hpp"
#include "vpng/parallel.hpp"

namespace vpng {
namespace {

using RowMajorXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// maps a layer's flat eta slice (W row-major, then bias) to fan_out x a_dim
Eigen::MatrixXd layer_grad_matrix(const LayerInfo& li,
                                  const ParamVector& grad) {
  Eigen::MatrixXd m(li.fan_out, li.a_dim());
  m.leftCols(li.fan_in) = Eigen::Map<const RowMajorXd>(
      grad.data() + li.param_offset, li.fan_out, li.fan_in);
  if (li.bias)
    m.col(li.fan_in) =
        grad.segment(li.param_offset + li.fan_out * li.fan_in, li.fan_out);
  return m;
}

void scatter_layer_matrix(const LayerInfo& li, const Eigen::MatrixXd& m,
                          ParamVector& out) {
  Eigen::Map<RowMajorXd>(out.data() + li.param_offset, li.fan_out, li.fan_in) =
      m.leftCols(li.fan_in);
  if (li.bias)
    out.segment(li.param_offset + li.fan_out * li.fan_in, li.fan_out) =
        m.col(li.fan_in);
}

// inverse of (scale * factor / corr + sqrt(mu) I), truncating large factors
Eigen::MatrixXd factored_inverse(const SymMatrix& factor, double corr,
                                 double scale, double mu, double K,
                                 int threshold) {
  const int d = factor.dim();
  const double gamma = std::sqrt(mu);
  Eigen::MatrixXd hat = (scale / corr) * factor.dense();

  if (d > threshold) {
    const LowRankFactor lr = low_rank_truncate(SymMatrix(hat), K);
    if (gamma == 0.0) {
      if (lr.rank < d || (lr.eigenvalues.array() <= 0.0).any())
        throw SingularSystem("kfac: truncated factor needs mu > 0");
    }
    const Eigen::VectorXd dinv = (lr.eigenvalues.array() + gamma).inverse();
    Eigen::MatrixXd inv =
        lr.eigenvectors * dinv.asDiagonal() * lr.eigenvectors.transpose();
    if (lr.rank < d)
      inv += (1.0 / gamma) *
             (Eigen::MatrixXd::Identity(d, d) -
              lr.eigenvectors * lr.eigenvectors.transpose());
    return inv;
  }

  hat.diagonal().array() += gamma;
  Eigen::LLT<Eigen::MatrixXd> llt(hat);
  if (llt.info() != Eigen::Success)
    throw SingularSystem("kfac: factor not invertible; increase mu");
  return llt.solve(Eigen::MatrixXd::Identity(d, d));
}

}  // namespace

NetworkView stacked_network_view(const Model& model,
                                 const VariationalProgram& program,
                                 const Layout& layout) {
  const Mlp* dec = model.generative_net();
  if (dec == nullptr)
    throw NotFeedForward("kfac: model has no layer decomposition");

  NetworkView view;
  const int L = layout.lambda_dim();
  if (const Mlp* enc = program.inference_net()) {
    require(enc->param_count() == L,
            "kfac: inference net does not span lambda");
    for (int l = 0; l < enc->layers(); ++l) {
      LayerInfo li;
      li.fan_in = enc->fan_in(l);
      li.fan_out = enc->fan_out(l);
      li.bias = enc->bias();
      li.param_offset = enc->layer_param_offset(l);
      li.param_count = enc->layer_param_count(l);
      view.layers.push_back(li);
    }
    view.n_encoder_layers = enc->layers();
  }
  require(dec->param_count() == layout.dim() - L,
          "kfac: generative net does not span theta");
  for (int l = 0; l < dec->layers(); ++l) {
    LayerInfo li;
    li.fan_in = dec->fan_in(l);
    li.fan_out = dec->fan_out(l);
    li.bias = dec->bias();
    li.param_offset = L + dec->layer_param_offset(l);
    li.param_count = dec->layer_param_count(l);
    view.layers.push_back(li);
  }
  return view;
}

KfacState::KfacState(const NetworkView& view, double rho, double K,
                     int lowrank_dim_threshold, double data_scale)
    : layers_(view.layers),
      rho_(rho),
      k_(K),
      lowrank_dim_threshold_(lowrank_dim_threshold),
      data_scale_(data_scale) {
  require(!layers_.empty(), "kfac: empty network view");
  require(rho >= 0.0 && rho < 1.0, "kfac: rho must be in [0, 1)");
  require(K > 0.0, "kfac: K must be positive");
  require(lowrank_dim_threshold >= 1, "kfac: bad low-rank threshold");
  require(data_scale > 0.0, "kfac: data_scale must be positive");
  a_.reserve(layers_.size());
  g_.reserve(layers_.size());
  for (const LayerInfo& li : layers_) {
    a_.emplace_back(li.a_dim());
    g_.emplace_back(li.fan_out);
  }
}

void KfacState::update_factors(const std::vector<LayerRecord>& records,
                               int n_samples) {
  const int nl = n_layers();
  require(n_samples >= 1, "kfac: update needs at least one sample");
  if (records.size() != static_cast<std::size_t>(n_samples) * nl)
    throw DimensionMismatch("kfac: record count does not match the view");

  ErrorCollector errs;
  parallel_for(nl, [&](std::int64_t l) {
    errs.run([&] {
      const LayerInfo& li = layers_[l];
      Eigen::MatrixXd ma = Eigen::MatrixXd::Zero(li.a_dim(), li.a_dim());
      Eigen::MatrixXd mg = Eigen::MatrixXd::Zero(li.fan_out, li.fan_out);
      for (int s = 0; s < n_samples; ++s) {
        const LayerRecord& r = records[static_cast<std::size_t>(s) * nl + l];
        if (r.a.size() != li.a_dim() || r.g.size() != li.fan_out)
          throw DimensionMismatch("kfac: record shape does not match layer");
        ma.noalias() += r.a * r.a.transpose();
        mg.noalias() += r.g * r.g.transpose();
      }
      ma /= n_samples;
      mg /= n_samples;
      a_[l] = SymMatrix(rho_ * a_[l].dense() + (1.0 - rho_) * ma);
      g_[l] = SymMatrix(rho_ * g_[l].dense() + (1.0 - rho_) * mg);
    });
  });
  errs.rethrow();
  ++steps_;
}

std::vector<LayerRecord> collect_predictive_records(
    const Model& model, const VariationalProgram& program, const Layout& layout,
    const ParamVector& eta, const PredictiveBatch& pred,
    const NetworkView& view) {
  require(pred.size() > 0 && pred.mc_samples >= 1,
          "kfac: empty predictive batch");
  const int B = pred.size();
  const int M = pred.mc_samples;
  const int nl = view.n_layers();
  const int D = layout.dim();
  const int L = layout.lambda_dim();
  const auto lambda = layout.lambda(eta);
  const auto theta = layout.theta(eta);

  std::vector<LayerRecord> recs(static_cast<std::size_t>(B) * M * nl);

  ErrorCollector errs;
  parallel_for(B, [&](std::int64_t i) {
    errs.run([&] {
      const int gi = pred.indices[i];
      const Eigen::VectorXd x = pred.rows->row(gi);
      const Eigen::VectorXd& z = pred.zhat[i];

      Model::Ws ws;
      Eigen::VectorXd t(model.out_dim());
      model.conditional(x, z, theta, t, &ws);

      Eigen::VectorXd dt(model.out_dim());
      Eigen::VectorXd gz(model.latent_dim());
      Eigen::VectorXd gtheta(D - L);
      Eigen::VectorXd glambda(L);
      for (int k = 0; k < M; ++k) {
        const Eigen::VectorXd xp = pred.xprime[i].row(k);
        model.out_dloglik(xp, t, dt);
        gz.setZero();
        gtheta.setZero();
        const int sample = static_cast<int>(i) * M + k;
        LayerSink dsink{&recs, sample * nl + view.n_encoder_layers};
        model.backprop(x, z, theta, &ws, dt, gz, gtheta, &dsink);
        if (view.n_encoder_layers > 0) {
          glambda.setZero();
          LayerSink esink{&recs, sample * nl};
          program.pullback(x, gi, lambda, pred.eps[i], gz, glambda, &esink);
        }
      }
    });
  });
  errs.rethrow();
  return recs;
}

Eigen::MatrixXd kfac_solve_layer(const KfacState& state, int l, double mu,
                                 const Eigen::MatrixXd& grad_l) {
  if (state.steps() < 1)
    throw FactorsUninitialized("kfac: solve before any factor update");
  require(mu >= 0.0, "kfac: mu must be >= 0");
  require(l >= 0 && l < state.n_layers(), "kfac: layer index out of range");
  const LayerInfo& li = state.layer(l);
  require(grad_l.rows() == li.fan_out && grad_l.cols() == li.a_dim(),
          "kfac: gradient shape does not match layer");

  const double corr = 1.0 - std::pow(state.rho(), state.steps());
  const double scale = std::sqrt(state.data_scale());
  const Eigen::MatrixXd ginv = factored_inverse(
      state.factor_g(l), corr, scale, mu, state.truncation_k(),
      state.lowrank_dim_threshold());
  const Eigen::MatrixXd ainv = factored_inverse(
      state.factor_a(l), corr, scale, mu, state.truncation_k(),
      state.lowrank_dim_threshold());
  return ginv * grad_l * ainv;
}

std::vector<Eigen::MatrixXd> kfac_solve(const KfacState& state, double mu,
                                        const std::vector<Eigen::MatrixXd>& grads) {
  require(grads.size() == static_cast<std::size_t>(state.n_layers()),
          "kfac: one gradient matrix per layer");
  std::vector<Eigen::MatrixXd> out;
  out.reserve(grads.size());
  for (int l = 0; l < state.n_layers(); ++l)
    out.push_back(kfac_solve_layer(state, l, mu, grads[l]));
  return out;
}

ParamVector kfac_direction(const KfacState& state, const NetworkView& view,
                           double mu, const ParamVector& grad) {
  require(view.n_layers() == state.n_layers(), "kfac: view does not match state");
  int covered = 0;
  for (const LayerInfo& li : view.layers) {
    require(li.param_offset >= 0 && li.param_offset + li.param_count <= grad.size(),
            "kfac: layer slice outside eta");
    covered += li.param_count;
  }

  ParamVector out;
  if (covered < grad.size()) {
    require(mu > 0.0, "kfac: uncovered coordinates need mu > 0");
    out = grad / mu;
  } else {
    out = ParamVector::Zero(grad.size());
  }
  for (int l = 0; l < state.n_layers(); ++l) {
    const LayerInfo& li = view.layers[l];
    const Eigen::MatrixXd dir =
        kfac_solve_layer(state, l, mu, layer_grad_matrix(li, grad));
    scatter_layer_matrix(li, dir, out);
  }
  return out;
}

double kfac_mean_curvature(const KfacState& state, int dim) {
  if (state.steps() < 1)
    throw FactorsUninitialized("kfac: curvature before any factor update");
  require(dim >= 1, "kfac: bad dimension");
  const double corr = 1.0 - std::pow(state.rho(), state.steps());
  double tr = 0.0;
  for (int l = 0; l < state.n_layers(); ++l) {
    const double ta = state.factor_a(l).dense().trace() / corr;
    const double tg = state.factor_g(l).dense().trace() / corr;
    tr += state.data_scale() * ta * tg;
  }
  return tr / dim;
}

}  // namespace vpng
