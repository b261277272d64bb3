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

#ifndef VPNG_LINALG_HPP_
#define VPNG_LINALG_HPP_

#include <Eigen/Dense>

#include "vpng/errors.hpp"

namespace vpng {

// Dense symmetric matrix. Construction validates symmetry (1e-12 absolute on
// each entry pair) unless the Symmetrize tag is used, which averages the
// off-diagonal pairs instead (handy for finite-difference Hessians).
class SymMatrix {
 public:
  struct SymmetrizeTag {};
  static constexpr SymmetrizeTag Symmetrize{};

  explicit SymMatrix(int dim) : m_(Eigen::MatrixXd::Zero(dim, dim)) {}
  explicit SymMatrix(const Eigen::MatrixXd& m);
  SymMatrix(const Eigen::MatrixXd& m, SymmetrizeTag);

  int dim() const { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }
  void set(int i, int j, double v) { m_(i, j) = v; m_(j, i) = v; }

  const Eigen::MatrixXd& dense() const { return m_; }

 private:
  Eigen::MatrixXd m_;
};

// Truncated eigendecomposition of a PSD matrix. Eigenvalues are sorted
// descending and clamped at zero; eigenvector columns are orthonormal.
struct LowRankFactor {
  int dim = 0;
  int rank = 0;
  Eigen::VectorXd eigenvalues;   // size rank
  Eigen::MatrixXd eigenvectors;  // dim x rank

  Eigen::MatrixXd reconstruct() const {
    return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
  }
};

// Solves (A + mu*I) x = g by Cholesky with one round of iterative refinement.
// mu must be >= 0. Throws SingularSystem if the factorization hits a
// non-positive pivot (possible when mu == 0 and A is singular or indefinite).
Eigen::VectorXd dampened_solve(const SymMatrix& A, double mu,
                               const Eigen::VectorXd& g);

// Keeps the top eigenpairs of a PSD matrix. The retained rank is
// min(dim, ceil(K * ln(dim))) for dim >= 2 and 1 for dim == 1.
// Throws NotPSD if the minimum eigenvalue is below -1e-6 * spectral norm;
// small negative eigenvalues above that are clamped to zero.
LowRankFactor low_rank_truncate(const SymMatrix& M, double K);

// Same, with the rank given directly (kfac uses this with its own policy).
LowRankFactor low_rank_truncate_rank(const SymMatrix& M, int rank);

// rank retention rule of low_rank_truncate, exposed for tests/config echo
int truncation_rank(int dim, double K);

double min_eigenvalue(const SymMatrix& M);

}  // namespace vpng

#endif  // VPNG_LINALG_HPP_
