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

#include "vpng/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "vpng/errors.hpp"
#include "vpng/rng.hpp"

namespace vpng {

std::pair<std::vector<int>, std::vector<int>> split_indices(int n,
                                                            double train_frac,
                                                            std::uint64_t seed) {
  require(n >= 1, "split_indices: n must be >= 1");
  require(train_frac > 0.0 && train_frac < 1.0,
          "split_indices: fraction must be in (0, 1)");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  CounterRng rng({seed, kDataGenStream, 0, 99, 0});
  for (int i = 0; i < n - 1; ++i) {
    const int j = i + static_cast<int>(rng.uniform() * (n - i));
    std::swap(order[i], order[j]);
  }
  const int n_train = std::max(1, std::min(n - 1, static_cast<int>(
                                  std::lround(train_frac * n))));
  std::vector<int> train(order.begin(), order.begin() + n_train);
  std::vector<int> test(order.begin() + n_train, order.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {train, test};
}

Dataset gen_logreg_data(int n, std::uint64_t seed) {
  require(n >= 2, "gen_logreg_data: n must be >= 2");
  Eigen::MatrixXd rows(n, 5);
  const Eigen::Vector4d w_true(1.0, -2.0, -3.0, 4.0);
  for (int i = 0; i < n; ++i) {
    CounterRng rng({seed, kDataGenStream, 0,
                    static_cast<std::uint64_t>(i), 0});
    const double a = -5.0 + 10.0 * rng.uniform();
    Eigen::Vector4d x(a, a / 2.0, a / 3.0, a / 4.0);
    for (int k = 0; k < 4; ++k) x[k] += -0.005 + 0.01 * rng.uniform();
    rows.block<1, 4>(i, 0) = x.transpose();
    rows(i, 4) = w_true.dot(x) >= 0.0 ? 1.0 : 0.0;
  }
  const auto [train_idx, test_idx] = split_indices(n, 0.8, seed);
  Dataset ds;
  ds.kind = DatasetKind::kLogregSynth;
  ds.train.resize(static_cast<Eigen::Index>(train_idx.size()), 5);
  ds.test.resize(static_cast<Eigen::Index>(test_idx.size()), 5);
  for (std::size_t i = 0; i < train_idx.size(); ++i)
    ds.train.row(static_cast<Eigen::Index>(i)) = rows.row(train_idx[i]);
  for (std::size_t i = 0; i < test_idx.size(); ++i)
    ds.test.row(static_cast<Eigen::Index>(i)) = rows.row(test_idx[i]);
  return ds;
}

Eigen::MatrixXd gen_toy_data(int n, double eps_corr, std::uint64_t seed) {
  require(n >= 1, "gen_toy_data: n must be >= 1");
  require(eps_corr > 0.0, "gen_toy_data: eps_corr must be > 0");
  // Cholesky of [[1, 1-eps], [1-eps, 1]]
  const double rho = 1.0 - eps_corr;
  const double l21 = rho;
  const double l22 = std::sqrt(1.0 - rho * rho);

  CounterRng mu_rng({seed, kDataGenStream, 0, 0, 1});
  const double mu0 = mu_rng.normal();
  const double mu1 = mu_rng.normal();

  Eigen::MatrixXd rows(n, 2);
  for (int i = 0; i < n; ++i) {
    CounterRng rng({seed, kDataGenStream, 1,
                    static_cast<std::uint64_t>(i), 0});
    const double u = rng.normal();
    const double v = rng.normal();
    rows(i, 0) = mu0 + u;
    rows(i, 1) = mu1 + l21 * u + l22 * v;
  }
  return rows;
}

Eigen::MatrixXd gen_blob_images(int n, std::uint64_t seed) {
  require(n >= 1, "gen_blob_images: n must be >= 1");
  Eigen::MatrixXd out(n, 64);
  for (int i = 0; i < n; ++i) {
    CounterRng rng({seed, kDataGenStream, 2,
                    static_cast<std::uint64_t>(i), 0});
    const int blobs = 2 + static_cast<int>(rng.uniform() * 2.0);
    out.row(i).setZero();
    for (int b = 0; b < blobs; ++b) {
      const double cy = 1.0 + 6.0 * rng.uniform();
      const double cx = 1.0 + 6.0 * rng.uniform();
      const double r = 1.0 + 1.5 * rng.uniform();
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
          const double d2 = (y - cy) * (y - cy) + (x - cx) * (x - cx);
          if (d2 <= r * r) out(i, y * 8 + x) = 1.0;
        }
    }
  }
  return out;
}

Eigen::MatrixXd gen_ratings_matrix(int n_users, int n_items, int latent,
                                   std::uint64_t seed) {
  require(n_users >= 1 && n_items >= 1 && latent >= 1,
          "gen_ratings_matrix: bad sizes");
  Eigen::MatrixXd U(n_users, latent);
  Eigen::MatrixXd V(n_items, latent);
  CounterRng urng({seed, kDataGenStream, 3, 0, 0});
  for (int i = 0; i < n_users; ++i)
    for (int k = 0; k < latent; ++k) U(i, k) = std::abs(urng.normal()) * 0.8;
  CounterRng vrng({seed, kDataGenStream, 3, 1, 0});
  for (int j = 0; j < n_items; ++j)
    for (int k = 0; k < latent; ++k) V(j, k) = std::abs(vrng.normal()) * 0.8;

  Eigen::MatrixXd counts(n_users, n_items);
  for (int i = 0; i < n_users; ++i) {
    CounterRng rng({seed, kDataGenStream, 4,
                    static_cast<std::uint64_t>(i), 0});
    for (int j = 0; j < n_items; ++j) {
      const double rate = U.row(i).dot(V.row(j));
      const long c = rng.poisson(rate);
      counts(i, j) = static_cast<double>(std::min<long>(c, 9));
    }
  }
  return counts;
}

RatingsData load_ratings(const std::string& path, int min_ratings_per_movie) {
  require(min_ratings_per_movie >= 0, "load_ratings: bad threshold");
  std::ifstream in(path);
  if (!in) throw Error("load_ratings: cannot open '" + path + "'");

  struct Entry {
    int user;
    int movie;
    int rating;
  };
  std::vector<Entry> entries;
  std::map<int, int> users;   // id -> dense row
  std::map<int, int> movies;  // id -> observation count
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tok;
    int field = 0;
    int user = 0, movie = 0;
    double raw = 0.0;
    std::string raw_text;
    while (std::getline(ls, tok, ',')) {
      switch (field) {
        case 0: user = std::stoi(tok); break;
        case 1: movie = std::stoi(tok); break;
        case 2: raw = std::stod(tok); raw_text = tok; break;
        default: break;  // extra columns (timestamps) are ignored
      }
      ++field;
    }
    if (field < 3)
      throw Error("load_ratings: line " + std::to_string(lineno) +
                  ": expected user,movie,rating");
    const double scaled = 2.0 * raw;
    const double rounded = std::round(scaled);
    if (raw < 0.5 || raw > 5.0 || std::abs(scaled - rounded) > 1e-9)
      throw BadRating("load_ratings: line " + std::to_string(lineno) +
                      ": rating " + raw_text + " is off the half-star grid");
    const int rating = static_cast<int>(rounded) - 1;
    entries.push_back({user, movie, rating});
    users.emplace(user, 0);
    ++movies[movie];
  }
  require(!entries.empty(), "load_ratings: no rating rows in '" + path + "'");

  int next_row = 0;
  for (auto& [id, row] : users) row = next_row++;
  RatingsData data;
  std::map<int, int> kept;  // movie id -> dense column
  for (const auto& [id, count] : movies) {
    if (count >= min_ratings_per_movie) {
      kept.emplace(id, static_cast<int>(data.movie_ids.size()));
      data.movie_ids.push_back(id);
    }
  }
  require(!data.movie_ids.empty(),
          "load_ratings: every movie fell under the rating threshold");

  data.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(users.size()),
                                      static_cast<Eigen::Index>(kept.size()));
  for (const Entry& e : entries) {
    const auto col = kept.find(e.movie);
    if (col == kept.end()) continue;
    data.matrix(users[e.user], col->second) = e.rating;
  }
  return data;
}

Dataset split_users(const Eigen::MatrixXd& matrix, double train_frac,
                    std::uint64_t seed) {
  const int n = static_cast<int>(matrix.rows());
  const auto [train_idx, test_idx] = split_indices(n, train_frac, seed);
  Dataset ds;
  ds.kind = DatasetKind::kRatings;
  ds.train.resize(static_cast<Eigen::Index>(train_idx.size()), matrix.cols());
  ds.test.resize(static_cast<Eigen::Index>(test_idx.size()), matrix.cols());
  for (std::size_t i = 0; i < train_idx.size(); ++i)
    ds.train.row(static_cast<Eigen::Index>(i)) = matrix.row(train_idx[i]);
  for (std::size_t i = 0; i < test_idx.size(); ++i)
    ds.test.row(static_cast<Eigen::Index>(i)) = matrix.row(test_idx[i]);
  return ds;
}

}  // namespace vpng
