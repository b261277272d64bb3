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

#ifndef VPNG_RUNNER_HPP_
#define VPNG_RUNNER_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "vpng/config.hpp"
#include "vpng/dataset.hpp"
#include "vpng/metrics.hpp"
#include "vpng/problem.hpp"

namespace vpng {

// Problem plus its data, ready to train.
struct PreparedProblem {
  Problem problem;
  DatasetKind kind = DatasetKind::kToyGaussian;
  Eigen::MatrixXd train;
  Eigen::MatrixXd test;
};

PreparedProblem prepare(const RunConfig& rc);

// One (config, seed) training trajectory. The final metrics average the last
// five evaluation rows (fewer when the run is shorter), which is also how
// summaries aggregate across seeds.
struct SingleRun {
  std::vector<MetricsRow> rows;
  double final_train = 0.0;
  double final_test = 0.0;
  bool diverged = false;
};

SingleRun run_single(const PreparedProblem& pp, const RunConfig& rc,
                     const TrainConfig& tc);

struct ExperimentResult {
  std::vector<MetricsRow> rows;  // every run, in seed-major then grid order
  std::vector<double> best_train_finals;  // per seed, grid-best run
  std::vector<double> best_test_finals;
  std::vector<double> best_steps;
  std::string summary;
};

// Runs the step grid for every seed, picks the grid-best per seed by final
// train metric and aggregates mean +/- sd across seeds.
ExperimentResult run_experiment(const RunConfig& rc);

// Quick self-contained invariants for `vpng-bench check`; returns the number
// of failures and prints one line per check.
int self_check(std::ostream& out);

}  // namespace vpng

#endif  // VPNG_RUNNER_HPP_
