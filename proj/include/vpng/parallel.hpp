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

// OpenMP kernels with serial twins.
//
// Every reduction here has a shape fixed by the element count alone, never by
// the thread count: the parallel and serial paths execute the same floating
// point additions in the same tree order, so results are bit-identical across
// thread counts and across the serial/parallel pair. Tests rely on that.

#ifndef VPNG_PARALLEL_HPP_
#define VPNG_PARALLEL_HPP_

#include <cstdint>
#include <exception>
#include <mutex>

#include <Eigen/Dense>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace vpng {

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// An exception escaping an OpenMP region aborts the process, so loop bodies
// run through this: the first thrown exception is kept and rethrown on the
// calling thread once the loop has joined.
class ErrorCollector {
 public:
  template <class F>
  void run(F&& fn) noexcept {
    try {
      fn();
    } catch (...) {
      std::lock_guard<std::mutex> lock(mutex_);
      if (!eptr_) eptr_ = std::current_exception();
    }
  }
  void rethrow() {
    if (eptr_) std::rethrow_exception(eptr_);
  }

 private:
  std::mutex mutex_;
  std::exception_ptr eptr_;
};

// Independent iterations, disjoint writes. fn(i) for i in [0, n).
template <class F>
void parallel_for(std::int64_t n, F&& fn) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::int64_t i = 0; i < n; ++i) fn(i);
}

template <class F>
void serial_for(std::int64_t n, F&& fn) {
  for (std::int64_t i = 0; i < n; ++i) fn(i);
}

// In-place pairwise tree fold over the rows of `slab`; the sum of all rows
// lands in row 0. Stride doubling: at stride s, row i += row (i+s) for
// i = 0, 2s, 4s, ... Writes at one level only read rows finished at earlier
// levels, so the level loop parallelizes without races.
inline void tree_fold_rows(Eigen::Ref<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> slab,
                           bool parallel) {
  const std::int64_t n = slab.rows();
  for (std::int64_t s = 1; s < n; s <<= 1) {
    const std::int64_t pairs = (n - s + 2 * s - 1) / (2 * s);  // ceil((n-s)/(2s))
    auto body = [&](std::int64_t j) {
      const std::int64_t i = 2 * s * j;
      if (i + s < n) slab.row(i) += slab.row(i + s);
    };
    if (parallel)
      parallel_for(pairs, body);
    else
      serial_for(pairs, body);
  }
}

// Same tree, scalar payload.
inline double tree_fold(Eigen::Ref<Eigen::VectorXd> v, bool parallel) {
  const std::int64_t n = v.size();
  if (n == 0) return 0.0;
  for (std::int64_t s = 1; s < n; s <<= 1) {
    const std::int64_t pairs = (n - s + 2 * s - 1) / (2 * s);
    auto body = [&](std::int64_t j) {
      const std::int64_t i = 2 * s * j;
      if (i + s < n) v[i] += v[i + s];
    };
    if (parallel)
      parallel_for(pairs, body);
    else
      serial_for(pairs, body);
  }
  return v[0];
}

// weight * (terms^T terms) with a fixed per-entry summation order (each
// output entry is one dot product over the term index, always front to
// back). terms is T x d, column-major so the dots run over contiguous
// memory; output is d x d symmetric.
inline Eigen::MatrixXd gram_weighted(const Eigen::MatrixXd& terms,
                                     double weight, bool parallel) {
  const std::int64_t d = terms.cols();
  Eigen::MatrixXd out(d, d);
  auto body = [&](std::int64_t r) {
    for (std::int64_t c = r; c < d; ++c) {
      const double v = weight * terms.col(r).dot(terms.col(c));
      out(r, c) = v;
      out(c, r) = v;
    }
  };
  if (parallel)
    parallel_for(d, body);
  else
    serial_for(d, body);
  return out;
}

}  // namespace vpng

#endif  // VPNG_PARALLEL_HPP_
