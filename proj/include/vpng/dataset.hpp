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

#ifndef VPNG_DATASET_HPP_
#define VPNG_DATASET_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace vpng {

enum class DatasetKind { kLogregSynth, kToyGaussian, kImages, kRatings };

// Train/test payloads, one record per row. Record meaning depends on kind:
// logreg rows are (x1..x4, label); toy rows are R^2 observations; image rows
// are binary pixels; ratings rows are one user's integer counts per movie.
struct Dataset {
  DatasetKind kind = DatasetKind::kToyGaussian;
  Eigen::MatrixXd train;
  Eigen::MatrixXd test;
};

// Shuffled index split: a pure function of (n, train_frac, seed).
std::pair<std::vector<int>, std::vector<int>> split_indices(int n,
                                                            double train_frac,
                                                            std::uint64_t seed);

// a ~ U[-5, 5]; x = (a, a/2, a/3, a/4) + U[-0.005, 0.005]^4;
// y = 1[<(1, -2, -3, 4), x> >= 0]; shuffled 80/20 split.
Dataset gen_logreg_data(int n, std::uint64_t seed);

// x_i ~ N(mu*, Sigma) with mu* ~ N(0, I) drawn once from the seed and
// Sigma = [[1, 1-eps], [1-eps, 1]].
Eigen::MatrixXd gen_toy_data(int n, double eps_corr, std::uint64_t seed);

// 8x8 binary blob images (two or three soft discs per image), n x 64
Eigen::MatrixXd gen_blob_images(int n, std::uint64_t seed);

// users x items integer matrix from a rank-`latent` Poisson ground truth,
// counts capped at 9 to stay on the rating grid
Eigen::MatrixXd gen_ratings_matrix(int n_users, int n_items, int latent,
                                   std::uint64_t seed);

struct RatingsData {
  Eigen::MatrixXd matrix;      // users x kept movies, integer counts 0..9
  std::vector<int> movie_ids;  // original column ids of the kept movies
};

// Comma-separated (user, movie, raw) rows with raw on the half-star grid
// {0.5, 1.0, ..., 5.0}; integer rating = round(2*raw) - 1. Unobserved cells
// stay zero. Movies with fewer than min_ratings_per_movie observed entries
// are dropped. Throws BadRating for off-grid values.
RatingsData load_ratings(const std::string& path, int min_ratings_per_movie);

// user-wise split of a ratings matrix (rows are users)
Dataset split_users(const Eigen::MatrixXd& matrix, double train_frac,
                    std::uint64_t seed);

}  // namespace vpng

#endif  // VPNG_DATASET_HPP_
