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

#ifndef VPNG_METRICS_HPP_
#define VPNG_METRICS_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace vpng {

// Mann-Whitney rank statistic: P(score_pos > score_neg) + 0.5 P(tie).
// Labels are 0/1; throws DegenerateLabels unless both classes appear.
double compute_auc(const Eigen::VectorXd& scores,
                   const std::vector<int>& labels);

struct MetricsRow {
  long iteration = 0;
  double wall_clock_s = 0.0;
  double train_elbo = 0.0;
  double test_elbo = 0.0;
  bool has_auc = false;
  double train_auc = 0.0;
  double test_auc = 0.0;
  std::string method;
  double step_size = 0.0;
  std::uint64_t seed = 0;
};

extern const char kMetricsHeader[];

// Shortest round-trip decimal formatting, so equal doubles always print the
// same bytes.
std::string format_double(double v);

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> read_metrics_csv(std::istream& in);

struct Summary {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation; 0 for a single value
  int count = 0;
};

Summary summarize(const std::vector<double>& values);
std::string format_summary(const Summary& s);  // "0.972 ± 0.011" style

}  // namespace vpng

#endif  // VPNG_METRICS_HPP_
