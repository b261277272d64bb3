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

#ifndef VPNG_CONFIG_HPP_
#define VPNG_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "vpng/optim.hpp"

namespace vpng {

// One experiment description: the training configuration plus the problem
// and dataset wiring the harness needs around it. Parsed from a flat
// key = value file; keys must match field names; unknown keys are errors.
struct RunConfig {
  TrainConfig train;

  std::string problem = "toy";  // toy | scalar | logreg | vae | pmf

  // grid/replication; empty step_grid means "just train.step_size"
  std::vector<double> step_grid;
  std::vector<std::uint64_t> seeds;  // empty means "just train.seed"

  // dataset wiring
  int n_data = 500;          // logreg/toy point count
  double eps_corr = 0.01;    // toy covariance
  int pixels = 64;           // vae (8x8)
  int latent = 10;
  int hidden = 32;
  int n_train_images = 1000;
  int n_test_images = 200;
  int n_users = 50;          // pmf
  int n_items = 30;
  int min_ratings_per_movie = 5000;
  std::uint64_t data_seed = 1;
  std::string data_path;     // idx images or ratings csv; empty = synthesize
  std::string labels_path;   // unused for now, accepted for idx pairs
  bool downscale = true;     // pool loaded images to 8x8

  // wall_clock_s column: virtual (iteration * 1e-3) unless real_clock
  bool real_clock = false;
};

RunConfig parse_config_text(const std::string& text, const std::string& origin);
RunConfig parse_config_file(const std::string& path);

}  // namespace vpng

#endif  // VPNG_CONFIG_HPP_
