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

#include "vpng/linalg.hpp"

#include <cmath>
#include <string>

namespace vpng {

namespace {
constexpr double kSymTol = 1e-12;
constexpr double kPsdRelTol = 1e-6;  // acceptance band on min eigenvalue

// Eigen's own OpenMP parallelism would make large products depend on the
// thread count; the determinism contract needs one fixed reduction order.
[[maybe_unused]] const bool kEigenSingleThread = [] {
  Eigen::setNbThreads(1);
  return true;
}();
}  // namespace

SymMatrix::SymMatrix(const Eigen::MatrixXd& m) : m_(m) {
  if (m.rows() != m.cols())
    throw DimensionMismatch("SymMatrix: " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i + 1; j < m.cols(); ++j)
      if (std::abs(m(i, j) - m(j, i)) > kSymTol)
        throw NotSymmetric("SymMatrix: entry (" + std::to_string(i) + "," +
                           std::to_string(j) + ") differs from its mirror by " +
                           std::to_string(std::abs(m(i, j) - m(j, i))));
}

SymMatrix::SymMatrix(const Eigen::MatrixXd& m, SymmetrizeTag)
    : m_(0.5 * (m + m.transpose())) {
  if (m.rows() != m.cols())
    throw DimensionMismatch("SymMatrix: matrix not square");
}

Eigen::VectorXd dampened_solve(const SymMatrix& A, double mu,
                               const Eigen::VectorXd& g) {
  require(mu >= 0.0, "dampened_solve: mu must be >= 0");
  const int d = A.dim();
  if (g.size() != d)
    throw DimensionMismatch("dampened_solve: A is " + std::to_string(d) +
                            "-dim, g is " + std::to_string(g.size()) + "-dim");

  Eigen::MatrixXd M = A.dense();
  M.diagonal().array() += mu;

  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success)
    throw SingularSystem("dampened_solve: non-positive pivot (mu = " +
                         std::to_string(mu) + ")");

  Eigen::VectorXd x = llt.solve(g);
  // one refinement pass keeps the residual bound honest when A is stiff
  Eigen::VectorXd r = g - M * x;
  x += llt.solve(r);
  if (!x.allFinite())
    throw SingularSystem("dampened_solve: solution is not finite");
  return x;
}

int truncation_rank(int dim, double K) {
  require(dim >= 1, "truncation_rank: dim must be >= 1");
  require(K > 0.0, "truncation_rank: K must be > 0");
  if (dim == 1) return 1;
  const int r = static_cast<int>(std::ceil(K * std::log(static_cast<double>(dim))));
  return std::min(dim, std::max(1, r));
}

namespace {

LowRankFactor truncate_impl(const SymMatrix& M, int rank) {
  const int d = M.dim();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M.dense());
  if (es.info() != Eigen::Success)
    throw Error("low_rank_truncate: eigendecomposition failed");

  // Eigen sorts ascending; check PSD against the spectral norm first.
  const double lo = es.eigenvalues()(0);
  const double hi = es.eigenvalues()(d - 1);
  const double spectral = std::max(std::abs(lo), std::abs(hi));
  if (lo < -kPsdRelTol * spectral)
    throw NotPSD("low_rank_truncate: min eigenvalue " + std::to_string(lo) +
                 " below -1e-6 * " + std::to_string(spectral));

  LowRankFactor f;
  f.dim = d;
  f.rank = rank;
  f.eigenvalues.resize(rank);
  f.eigenvectors.resize(d, rank);
  for (int k = 0; k < rank; ++k) {
    const int src = d - 1 - k;  // descending
    f.eigenvalues(k) = std::max(0.0, es.eigenvalues()(src));
    f.eigenvectors.col(k) = es.eigenvectors().col(src);
  }
  return f;
}

}  // namespace

LowRankFactor low_rank_truncate(const SymMatrix& M, double K) {
  return truncate_impl(M, truncation_rank(M.dim(), K));
}

LowRankFactor low_rank_truncate_rank(const SymMatrix& M, int rank) {
  require(rank >= 1 && rank <= M.dim(), "low_rank_truncate_rank: bad rank");
  return truncate_impl(M, rank);
}

double min_eigenvalue(const SymMatrix& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M.dense(),
                                                    Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw Error("min_eigenvalue: eigendecomposition failed");
  return es.eigenvalues()(0);
}

}  // namespace vpng
