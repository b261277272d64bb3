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

#include "vpng/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

#include "vpng/errors.hpp"

namespace vpng {

const char kMetricsHeader[] =
    "iteration,wall_clock_s,train_elbo,test_elbo,train_auc,test_auc,method,"
    "step_size,seed";

double compute_auc(const Eigen::VectorXd& scores,
                   const std::vector<int>& labels) {
  const int n = static_cast<int>(scores.size());
  require(n == static_cast<int>(labels.size()), "compute_auc: size mismatch");
  require(scores.allFinite(), "compute_auc: non-finite score");
  int pos = 0;
  for (int l : labels) {
    require(l == 0 || l == 1, "compute_auc: labels must be 0/1");
    pos += l;
  }
  const int neg = n - pos;
  if (pos == 0 || neg == 0)
    throw DegenerateLabels("compute_auc: need both classes present");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return scores[a] < scores[b]; });

  // tie-averaged ranks, 1-based
  double rank_pos_sum = 0.0;
  int i = 0;
  while (i < n) {
    int j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * ((i + 1) + j);  // mean of ranks i+1..j
    for (int k = i; k < j; ++k)
      if (labels[order[k]] == 1) rank_pos_sum += avg_rank;
    i = j;
  }
  return (rank_pos_sum - 0.5 * pos * (pos + 1)) /
         (static_cast<double>(pos) * neg);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << kMetricsHeader << '\n';
  for (const MetricsRow& r : rows) {
    out << r.iteration << ',' << format_double(r.wall_clock_s) << ','
        << format_double(r.train_elbo) << ',' << format_double(r.test_elbo)
        << ',';
    if (r.has_auc)
      out << format_double(r.train_auc) << ',' << format_double(r.test_auc);
    else
      out << ',';
    out << ',' << r.method << ',' << format_double(r.step_size) << ','
        << r.seed << '\n';
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double(const std::string& s, int lineno) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw Error("metrics csv: line " + std::to_string(lineno) +
                ": bad number '" + s + "'");
  return v;
}

}  // namespace

std::vector<MetricsRow> read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader)
    throw Error("metrics csv: missing or wrong header");
  std::vector<MetricsRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 9)
      throw Error("metrics csv: line " + std::to_string(lineno) +
                  ": expected 9 fields");
    MetricsRow r;
    r.iteration = static_cast<long>(parse_double(f[0], lineno));
    r.wall_clock_s = parse_double(f[1], lineno);
    r.train_elbo = parse_double(f[2], lineno);
    r.test_elbo = parse_double(f[3], lineno);
    r.has_auc = !f[4].empty() || !f[5].empty();
    if (r.has_auc) {
      r.train_auc = parse_double(f[4], lineno);
      r.test_auc = parse_double(f[5], lineno);
    }
    r.method = f[6];
    r.step_size = parse_double(f[7], lineno);
    r.seed = static_cast<std::uint64_t>(parse_double(f[8], lineno));
    rows.push_back(r);
  }
  return rows;
}

Summary summarize(const std::vector<double>& values) {
  require(!values.empty(), "summarize: no values");
  Summary s;
  s.count = static_cast<int>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / s.count;
  if (s.count > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / (s.count - 1));
  }
  return s;
}

std::string format_summary(const Summary& s) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3) << s.mean << " ± " << s.sd;
  return out.str();
}

}  // namespace vpng
