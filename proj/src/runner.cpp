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

#include "vpng/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <ostream>
#include <sstream>

#include "vpng/idx_io.hpp"
#include "vpng/models/logreg.hpp"
#include "vpng/models/toy_gaussian.hpp"
#include "vpng/optim.hpp"

namespace vpng {
namespace {

constexpr double kVirtualSecondsPerIter = 1e-3;
constexpr int kFinalWindow = 5;  // evals averaged into the final metric
constexpr int kRefitIters = 100;
constexpr double kRefitStep = 0.05;

const char* method_name(Method m) {
  switch (m) {
    case Method::kGrad: return "grad";
    case Method::kNg: return "ng";
    case Method::kVpng: return "vpng";
  }
  return "?";
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& all,
                          const std::vector<int>& idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), all.cols());
  for (std::size_t i = 0; i < idx.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = all.row(idx[i]);
  return out;
}

double scalar_column_auc(const LogRegModel& model,
                         const Eigen::VectorXd& weights,
                         const Eigen::MatrixXd& rows) {
  const int n = static_cast<int>(rows.rows());
  Eigen::VectorXd scores(n);
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) {
    scores[i] = model.score(weights, rows.row(i));
    labels[i] = rows(i, rows.cols() - 1) >= 0.5 ? 1 : 0;
  }
  return compute_auc(scores, labels);
}

// Test ELBO for per-user latents: fresh mean-field parameters for the test
// users are refit by plain gradient ascent with the model parameters frozen,
// then the ELBO is evaluated with the shared evaluation noise.
double refit_test_elbo(const PreparedProblem& pp, const TrainConfig& tc,
                       const ParamVector& eta_trained) {
  const int n_test = static_cast<int>(pp.test.rows());
  const int items = static_cast<int>(pp.test.cols());
  const int latent = pp.problem.model->latent_dim();
  Problem tp = make_pmf_problem(n_test, items, latent);
  ParamVector eta = tp.init_eta(tc.seed);
  const int L = tp.layout.lambda_dim();
  const int T = tp.layout.theta_dim();
  eta.tail(T) = pp.problem.layout.theta(eta_trained);

  const Batch all = Batch::all(pp.test);
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(L);
  for (int r = 0; r < kRefitIters; ++r) {
    const SeedCtx ctx{tc.seed, static_cast<std::uint64_t>(r), kRefitStream};
    const ElboEstimate est = grad_elbo(*tp.model, *tp.program, tp.layout, eta,
                                       all, tc.M, 1.0, ctx);
    const Eigen::VectorXd g = est.grad.head(L);
    m2 = 0.9 * m2.array() + 0.1 * g.array().square();
    eta.head(L) +=
        kRefitStep * (g.array() / (m2.array() + 1e-8).sqrt()).matrix();
  }
  const SeedCtx ectx{tc.seed, 0, kEvalNoiseStream};
  return estimate_elbo(*tp.model, *tp.program, tp.layout, eta, all, tc.M, 1.0,
                       ectx)
      .value;
}

MetricsRow eval_row(const PreparedProblem& pp, const TrainConfig& tc,
                    const OptimState& st, double wall_clock_s) {
  MetricsRow r;
  r.iteration = st.iteration;
  r.wall_clock_s = wall_clock_s;
  r.method = method_name(tc.method);
  r.step_size = tc.step_size;
  r.seed = tc.seed;

  const SeedCtx ectx{tc.seed, 0, kEvalNoiseStream};
  const Model& model = *pp.problem.model;
  const VariationalProgram& program = *pp.problem.program;
  const Layout& layout = pp.problem.layout;
  r.train_elbo = estimate_elbo(model, program, layout, st.eta,
                               Batch::all(pp.train), tc.M, 1.0, ectx)
                     .value;
  if (pp.kind == DatasetKind::kRatings) {
    r.test_elbo = refit_test_elbo(pp, tc, st.eta);
  } else {
    r.test_elbo = estimate_elbo(model, program, layout, st.eta,
                                Batch::all(pp.test), tc.M, 1.0, ectx)
                      .value;
  }
  if (pp.kind == DatasetKind::kLogregSynth) {
    const auto* lr = dynamic_cast<const LogRegModel*>(&model);
    require(lr != nullptr, "runner: logreg dataset without a logreg model");
    const Eigen::VectorXd w = layout.slice(st.eta, "lambda.means");
    r.has_auc = true;
    r.train_auc = scalar_column_auc(*lr, w, pp.train);
    r.test_auc = scalar_column_auc(*lr, w, pp.test);
  }
  return r;
}

double final_metric(const std::vector<MetricsRow>& rows, bool use_auc,
                    bool train_side) {
  if (rows.empty()) return std::numeric_limits<double>::quiet_NaN();
  const int take = std::min<int>(kFinalWindow, static_cast<int>(rows.size()));
  double sum = 0.0;
  for (int i = static_cast<int>(rows.size()) - take;
       i < static_cast<int>(rows.size()); ++i) {
    const MetricsRow& r = rows[i];
    if (use_auc)
      sum += train_side ? r.train_auc : r.test_auc;
    else
      sum += train_side ? r.train_elbo : r.test_elbo;
  }
  return sum / take;
}

}  // namespace

PreparedProblem prepare(const RunConfig& rc) {
  PreparedProblem pp;
  if (rc.problem == "toy") {
    pp.kind = DatasetKind::kToyGaussian;
    const Eigen::MatrixXd all = gen_toy_data(rc.n_data, rc.eps_corr,
                                             rc.data_seed);
    const auto [tr, te] = split_indices(rc.n_data, 0.8, rc.data_seed);
    pp.train = take_rows(all, tr);
    pp.test = take_rows(all, te);
    pp.problem = make_toy_problem(rc.eps_corr);
  } else if (rc.problem == "scalar") {
    pp.kind = DatasetKind::kToyGaussian;
    Eigen::MatrixXd all(rc.n_data, 1);
    for (int i = 0; i < rc.n_data; ++i) {
      CounterRng rng({rc.data_seed, kDataGenStream, 5,
                      static_cast<std::uint64_t>(i), 0});
      all(i, 0) = rng.normal() + rng.normal();  // theta_true = 1
    }
    const auto [tr, te] = split_indices(rc.n_data, 0.8, rc.data_seed);
    pp.train = take_rows(all, tr);
    pp.test = take_rows(all, te);
    pp.problem = make_scalar_problem(1.0, 0.0);
  } else if (rc.problem == "logreg") {
    pp.kind = DatasetKind::kLogregSynth;
    Dataset ds = gen_logreg_data(rc.n_data, rc.data_seed);
    pp.train = std::move(ds.train);
    pp.test = std::move(ds.test);
    pp.problem = make_logreg_problem();
  } else if (rc.problem == "vae") {
    pp.kind = DatasetKind::kImages;
    Eigen::MatrixXd all;
    if (!rc.data_path.empty()) {
      const IdxImages img = read_idx_images(rc.data_path);
      all = binarize_images(img);
      if (rc.downscale) all = downscale_to_8x8(all, img.rows, img.cols);
    } else {
      all = gen_blob_images(rc.n_train_images + rc.n_test_images,
                            rc.data_seed);
    }
    require(all.rows() >= rc.n_train_images + rc.n_test_images,
            "runner: not enough images for the requested split");
    pp.train = all.topRows(rc.n_train_images);
    pp.test = all.middleRows(rc.n_train_images, rc.n_test_images);
    pp.problem = make_vae_problem(static_cast<int>(all.cols()), rc.latent,
                                  rc.hidden);
  } else if (rc.problem == "pmf") {
    pp.kind = DatasetKind::kRatings;
    Eigen::MatrixXd matrix;
    if (!rc.data_path.empty())
      matrix = load_ratings(rc.data_path, rc.min_ratings_per_movie).matrix;
    else
      matrix = gen_ratings_matrix(rc.n_users, rc.n_items, 3, rc.data_seed);
    Dataset ds = split_users(matrix, 0.9, rc.data_seed);
    pp.train = std::move(ds.train);
    pp.test = std::move(ds.test);
    pp.problem = make_pmf_problem(static_cast<int>(pp.train.rows()),
                                  static_cast<int>(pp.train.cols()),
                                  rc.latent);
  } else {
    throw ConfigError("runner: unknown problem '" + rc.problem + "'");
  }
  return pp;
}

SingleRun run_single(const PreparedProblem& pp, const RunConfig& rc,
                     const TrainConfig& tc) {
  validate(tc);
  SingleRun run;
  OptimState st = init_state(pp.problem, tc,
                             static_cast<int>(pp.train.rows()));
  const auto start = std::chrono::steady_clock::now();
  auto clock_now = [&](int iteration) {
    if (!rc.real_clock) return iteration * kVirtualSecondsPerIter;
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  };

  try {
    for (int it = 0; it < tc.max_iters; ++it) {
      if (tc.time_budget_s > 0.0 && clock_now(it) >= tc.time_budget_s) break;
      const Batch batch = sample_batch(pp.train, tc.batch_size, tc.seed,
                                       static_cast<std::uint64_t>(it));
      step(st, tc, pp.problem, batch);
      if (st.iteration % tc.eval_every == 0)
        run.rows.push_back(eval_row(pp, tc, st, clock_now(st.iteration)));
    }
  } catch (const NonFiniteParameter&) {
    run.diverged = true;
  }

  const bool use_auc = pp.kind == DatasetKind::kLogregSynth;
  if (run.diverged) {
    run.final_train = std::numeric_limits<double>::quiet_NaN();
    run.final_test = std::numeric_limits<double>::quiet_NaN();
  } else {
    run.final_train = final_metric(run.rows, use_auc, true);
    run.final_test = final_metric(run.rows, use_auc, false);
  }
  return run;
}

ExperimentResult run_experiment(const RunConfig& rc) {
  const PreparedProblem pp = prepare(rc);
  std::vector<double> steps = rc.step_grid;
  if (steps.empty()) steps.push_back(rc.train.step_size);
  std::vector<std::uint64_t> seeds = rc.seeds;
  if (seeds.empty()) seeds.push_back(rc.train.seed);

  ExperimentResult result;
  std::ostringstream summary;
  summary << "problem=" << rc.problem
          << " method=" << method_name(rc.train.method)
          << " seeds=" << seeds.size() << " grid=" << steps.size() << "\n";

  for (const std::uint64_t seed : seeds) {
    std::vector<TrainConfig> configs;
    for (const double s : steps) {
      TrainConfig tc = rc.train;
      tc.seed = seed;
      tc.step_size = s;
      configs.push_back(tc);
    }
    std::vector<SingleRun> runs;
    runs.reserve(configs.size());
    const GridResult grid = grid_search(
        configs, [&](const TrainConfig& tc) {
          runs.push_back(run_single(pp, rc, tc));
          if (runs.back().diverged)
            return std::numeric_limits<double>::quiet_NaN();
          return runs.back().final_train;
        });
    for (const SingleRun& r : runs)
      result.rows.insert(result.rows.end(), r.rows.begin(), r.rows.end());
    const SingleRun& best = runs[static_cast<std::size_t>(grid.best_index)];
    result.best_train_finals.push_back(best.final_train);
    result.best_test_finals.push_back(best.final_test);
    result.best_steps.push_back(configs[grid.best_index].step_size);
    summary << "seed " << seed << ": best_step="
            << format_double(configs[grid.best_index].step_size)
            << " final_train=" << format_double(best.final_train)
            << " final_test=" << format_double(best.final_test) << "\n";
  }

  const bool use_auc = pp.kind == DatasetKind::kLogregSynth;
  const char* metric = use_auc ? "auc" : "elbo";
  summary << "train_" << metric << ": "
          << format_summary(summarize(result.best_train_finals)) << "\n";
  summary << "test_" << metric << ": "
          << format_summary(summarize(result.best_test_finals)) << "\n";
  result.summary = summary.str();
  return result;
}

int self_check(std::ostream& out) {
  int failures = 0;
  auto report = [&](const char* name, bool ok) {
    out << (ok ? "ok - " : "FAIL - ") << name << "\n";
    if (!ok) ++failures;
  };

  {
    Eigen::VectorXd scores(4);
    scores << 0.1, 0.4, 0.35, 0.8;
    const std::vector<int> labels{0, 0, 1, 1};
    report("auc brute-force example", compute_auc(scores, labels) == 0.75);
  }
  {
    Eigen::VectorXd scores(6);
    scores << -1.5, 0.2, 0.2, 3.0, -0.7, 1.1;
    const std::vector<int> labels{0, 1, 0, 1, 0, 1};
    const double base = compute_auc(scores, labels);
    const double mono =
        compute_auc((0.3 * scores.array() + 2.0).exp().matrix(), labels);
    report("auc monotone invariance", std::abs(base - mono) < 1e-15);
  }
  {
    std::vector<MetricsRow> rows(2);
    rows[0] = {100, 0.1, -12.5, -13.25, false, 0, 0, "grad", 0.01, 7};
    rows[1] = {200, 0.2, -11.0, -12.0, true, 0.9, 0.8, "vpng", 0.1, 7};
    std::ostringstream first;
    write_metrics_csv(first, rows);
    std::istringstream back(first.str());
    std::ostringstream second;
    write_metrics_csv(second, read_metrics_csv(back));
    report("metrics csv round trip", first.str() == second.str());
  }
  {
    const int n = 50;
    const Eigen::MatrixXd data = gen_toy_data(n, 0.01, 3);
    const ToyGaussianModel model(0.01);
    const auto post = toy_posterior(model, data);
    const Eigen::Vector2d g = toy_elbo_gradient(model, data, post.mean);
    report("toy gradient vanishes at the posterior mean", g.norm() < 1e-9);
  }
  {
    RunConfig rc;
    rc.problem = "logreg";
    rc.n_data = 60;
    rc.train.method = Method::kVpng;
    rc.train.M = 2;
    rc.train.max_iters = 10;
    rc.train.eval_every = 5;
    rc.train.step_size = 0.05;
    const PreparedProblem pp = prepare(rc);
    const SingleRun a = run_single(pp, rc, rc.train);
    const SingleRun b = run_single(pp, rc, rc.train);
    std::ostringstream sa, sb;
    write_metrics_csv(sa, a.rows);
    write_metrics_csv(sb, b.rows);
    report("repeat run determinism", sa.str() == sb.str());
  }
  {
    IdxImages img;
    img.n = 1;
    img.rows = 2;
    img.cols = 2;
    img.bytes = {0, 127, 128, 255};
    const auto path = std::filesystem::temp_directory_path() /
                      "vpng_selfcheck_idx.bin";
    write_idx_images(path.string(), img);
    const IdxImages back = read_idx_images(path.string());
    const Eigen::MatrixXd bin = binarize_images(back);
    std::filesystem::remove(path);
    report("idx round trip and threshold",
           back.bytes == img.bytes && bin(0, 0) == 0.0 && bin(0, 1) == 0.0 &&
               bin(0, 2) == 1.0 && bin(0, 3) == 1.0);
  }
  return failures;
}

}  // namespace vpng
