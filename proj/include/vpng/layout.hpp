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

#ifndef VPNG_LAYOUT_HPP_
#define VPNG_LAYOUT_HPP_

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vpng/errors.hpp"

namespace vpng {

// eta = (lambda, theta) lives in one flat vector; Layout names the pieces.
// Variational blocks come first (all of lambda), model blocks after.
// Mean-field blocks follow the "means first, then log-stddevs" order, i.e.
// the optimizer always works in log-stddev coordinates for learned scales.
using ParamVector = Eigen::VectorXd;

struct Block {
  std::string name;
  int offset = 0;
  int size = 0;
};

class Layout {
 public:
  Layout() = default;

  int add(const std::string& name, int size) {
    const int off = dim_;
    blocks_.push_back({name, off, size});
    dim_ += size;
    return off;
  }
  void set_lambda_dim(int d) { lambda_dim_ = d; }

  int dim() const { return dim_; }
  int lambda_dim() const { return lambda_dim_; }
  int theta_dim() const { return dim_ - lambda_dim_; }

  const std::vector<Block>& blocks() const { return blocks_; }

  const Block& block(const std::string& name) const {
    for (const auto& b : blocks_)
      if (b.name == name) return b;
    throw Error("Layout: no block named '" + name + "'");
  }
  bool has_block(const std::string& name) const {
    for (const auto& b : blocks_)
      if (b.name == name) return true;
    return false;
  }

  Eigen::VectorBlock<ParamVector> slice(ParamVector& v, const std::string& name) const {
    const Block& b = block(name);
    check(v);
    return v.segment(b.offset, b.size);
  }
  Eigen::VectorBlock<const ParamVector> slice(const ParamVector& v, const std::string& name) const {
    const Block& b = block(name);
    check(v);
    return v.segment(b.offset, b.size);
  }

  Eigen::VectorBlock<ParamVector> lambda(ParamVector& v) const {
    check(v);
    return v.segment(0, lambda_dim_);
  }
  Eigen::VectorBlock<const ParamVector> lambda(const ParamVector& v) const {
    check(v);
    return v.segment(0, lambda_dim_);
  }
  Eigen::VectorBlock<ParamVector> theta(ParamVector& v) const {
    check(v);
    return v.segment(lambda_dim_, theta_dim());
  }
  Eigen::VectorBlock<const ParamVector> theta(const ParamVector& v) const {
    check(v);
    return v.segment(lambda_dim_, theta_dim());
  }

 private:
  void check(const ParamVector& v) const {
    if (v.size() != dim_)
      throw DimensionMismatch("Layout: vector has " + std::to_string(v.size()) +
                              " entries, layout expects " + std::to_string(dim_));
  }

  std::vector<Block> blocks_;
  int dim_ = 0;
  int lambda_dim_ = 0;
};

}  // namespace vpng

#endif  // VPNG_LAYOUT_HPP_
