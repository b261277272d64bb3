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

#include "vpng/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "vpng/errors.hpp"

namespace vpng {
namespace {

struct Cursor {
  std::string origin;
  int lineno = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + msg);
  }
};

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& v, const Cursor& at) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    at.fail("expected a number, got '" + v + "'");
  return out;
}

long to_long(const std::string& v, const Cursor& at) {
  long out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    at.fail("expected an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& v, const Cursor& at) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  at.fail("expected a boolean, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::istringstream ss(v);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

void apply(RunConfig& rc, const std::string& key, const std::string& value,
           const Cursor& at) {
  TrainConfig& tc = rc.train;
  if (key == "method") {
    if (value == "grad") tc.method = Method::kGrad;
    else if (value == "ng") tc.method = Method::kNg;
    else if (value == "vpng") tc.method = Method::kVpng;
    else at.fail("method must be grad, ng or vpng");
  } else if (key == "curvature_backend") {
    if (value == "dense") tc.curvature_backend = Backend::kDense;
    else if (value == "kfac") tc.curvature_backend = Backend::kKfac;
    else at.fail("curvature_backend must be dense or kfac");
  } else if (key == "adapter") {
    if (value == "none") tc.adapter = Adapter::kNone;
    else if (value == "rmsprop") tc.adapter = Adapter::kRmsprop;
    else if (value == "adam") tc.adapter = Adapter::kAdam;
    else at.fail("adapter must be none, rmsprop or adam");
  } else if (key == "step_size") {
    tc.step_size = to_double(value, at);
  } else if (key == "decay") {
    tc.decay = to_double(value, at);
  } else if (key == "beta1") {
    tc.beta1 = to_double(value, at);
  } else if (key == "beta2") {
    tc.beta2 = to_double(value, at);
  } else if (key == "eps_stab") {
    tc.eps_stab = to_double(value, at);
  } else if (key == "M") {
    tc.M = static_cast<int>(to_long(value, at));
  } else if (key == "mu") {
    if (value == "auto") tc.mu = -1.0;
    else tc.mu = to_double(value, at);
  } else if (key == "beta") {
    tc.beta = to_double(value, at);
  } else if (key == "batch_size") {
    tc.batch_size = static_cast<int>(to_long(value, at));
  } else if (key == "max_iters") {
    tc.max_iters = static_cast<int>(to_long(value, at));
  } else if (key == "time_budget_s") {
    tc.time_budget_s = to_double(value, at);
  } else if (key == "eval_every") {
    tc.eval_every = static_cast<int>(to_long(value, at));
  } else if (key == "seed") {
    tc.seed = static_cast<std::uint64_t>(to_long(value, at));
  } else if (key == "K") {
    tc.K = to_double(value, at);
  } else if (key == "rho") {
    tc.rho = to_double(value, at);
  } else if (key == "lowrank_dim_threshold") {
    tc.lowrank_dim_threshold = static_cast<int>(to_long(value, at));
  } else if (key == "problem") {
    if (value != "toy" && value != "scalar" && value != "logreg" &&
        value != "vae" && value != "pmf")
      at.fail("problem must be toy, scalar, logreg, vae or pmf");
    rc.problem = value;
  } else if (key == "step_grid") {
    rc.step_grid.clear();
    for (const std::string& s : split_list(value))
      rc.step_grid.push_back(to_double(s, at));
    if (rc.step_grid.empty()) at.fail("step_grid must list at least one step");
  } else if (key == "seeds") {
    rc.seeds.clear();
    for (const std::string& s : split_list(value))
      rc.seeds.push_back(static_cast<std::uint64_t>(to_long(s, at)));
    if (rc.seeds.empty()) at.fail("seeds must list at least one seed");
  } else if (key == "n_data") {
    rc.n_data = static_cast<int>(to_long(value, at));
  } else if (key == "eps_corr") {
    rc.eps_corr = to_double(value, at);
  } else if (key == "pixels") {
    rc.pixels = static_cast<int>(to_long(value, at));
  } else if (key == "latent") {
    rc.latent = static_cast<int>(to_long(value, at));
  } else if (key == "hidden") {
    rc.hidden = static_cast<int>(to_long(value, at));
  } else if (key == "n_train_images") {
    rc.n_train_images = static_cast<int>(to_long(value, at));
  } else if (key == "n_test_images") {
    rc.n_test_images = static_cast<int>(to_long(value, at));
  } else if (key == "n_users") {
    rc.n_users = static_cast<int>(to_long(value, at));
  } else if (key == "n_items") {
    rc.n_items = static_cast<int>(to_long(value, at));
  } else if (key == "min_ratings_per_movie") {
    rc.min_ratings_per_movie = static_cast<int>(to_long(value, at));
  } else if (key == "data_seed") {
    rc.data_seed = static_cast<std::uint64_t>(to_long(value, at));
  } else if (key == "data_path") {
    rc.data_path = value;
  } else if (key == "labels_path") {
    rc.labels_path = value;
  } else if (key == "downscale") {
    rc.downscale = to_bool(value, at);
  } else if (key == "real_clock") {
    rc.real_clock = to_bool(value, at);
  } else {
    at.fail("unknown key '" + key + "'");
  }
}

}  // namespace

RunConfig parse_config_text(const std::string& text,
                            const std::string& origin) {
  RunConfig rc;
  std::istringstream in(text);
  std::string line;
  Cursor at{origin, 0};
  while (std::getline(in, line)) {
    ++at.lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) at.fail("expected 'key = value'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) at.fail("empty key");
    if (value.empty()) at.fail("empty value for '" + key + "'");
    apply(rc, key, value, at);
  }
  validate(rc.train);
  return rc;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

}  // namespace vpng
