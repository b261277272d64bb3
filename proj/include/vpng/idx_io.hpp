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

#ifndef VPNG_IDX_IO_HPP_
#define VPNG_IDX_IO_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace vpng {

// Raw IDX image payload: big-endian magic 2051, then counts, then bytes.
struct IdxImages {
  int n = 0;
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> bytes;  // n * rows * cols, row-major per image
};

IdxImages read_idx_images(const std::string& path);
void write_idx_images(const std::string& path, const IdxImages& images);

// magic 2049, one byte per label
std::vector<std::uint8_t> read_idx_labels(const std::string& path);
void write_idx_labels(const std::string& path,
                      const std::vector<std::uint8_t>& labels);

// byte >= 128 -> 1.0, else 0.0; one image per output row
Eigen::MatrixXd binarize_images(const IdxImages& images);

// Average-pools each binary image to 8x8 (fractional boxes for sizes that do
// not divide evenly) and re-thresholds at 0.5.
Eigen::MatrixXd downscale_to_8x8(const Eigen::MatrixXd& pixels, int rows,
                                 int cols);

}  // namespace vpng

#endif  // VPNG_IDX_IO_HPP_
