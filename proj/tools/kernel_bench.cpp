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

// Times the OpenMP reduction kernels against their serial references and
// verifies the results are bit-identical (the folds are order-fixed).

#include <chrono>
#include <cstdio>

#include <Eigen/Dense>

#include "vpng/parallel.hpp"
#include "vpng/rng.hpp"

namespace {

using RowMajorXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

RowMajorXd random_slab(int rows, int cols, std::uint64_t seed) {
  RowMajorXd slab(rows, cols);
  vpng::CounterRng rng({seed, vpng::kTestStream, 0, 0, 0});
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) slab(i, j) = rng.normal();
  return slab;
}

}  // namespace

int main() {
  Eigen::setNbThreads(1);
  std::printf("threads available: %d\n", vpng::max_threads());

  {
    const int rows = 20000, cols = 200;
    const RowMajorXd base = random_slab(rows, cols, 11);
    RowMajorXd serial = base;
    double t0 = now_s();
    vpng::tree_fold_rows(serial, false);
    const double t_serial = now_s() - t0;
    RowMajorXd parallel = base;
    t0 = now_s();
    vpng::tree_fold_rows(parallel, true);
    const double t_parallel = now_s() - t0;
    const double max_diff =
        (serial.row(0) - parallel.row(0)).cwiseAbs().maxCoeff();
    std::printf("tree_fold_rows %dx%d: serial %.4fs parallel %.4fs "
                "max|diff| %.3g\n",
                rows, cols, t_serial, t_parallel, max_diff);
  }

  {
    const int rows = 4000, cols = 300;
    const Eigen::MatrixXd terms = random_slab(rows, cols, 12);
    double t0 = now_s();
    const Eigen::MatrixXd serial = vpng::gram_weighted(terms, 0.5, false);
    const double t_serial = now_s() - t0;
    t0 = now_s();
    const Eigen::MatrixXd parallel = vpng::gram_weighted(terms, 0.5, true);
    const double t_parallel = now_s() - t0;
    const double max_diff = (serial - parallel).cwiseAbs().maxCoeff();
    std::printf("gram_weighted %dx%d: serial %.4fs parallel %.4fs "
                "max|diff| %.3g\n",
                rows, cols, t_serial, t_parallel, max_diff);
  }

  return 0;
}
