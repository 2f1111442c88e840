// Copyright 2026 The kpzlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "kpz/experiments.hpp"
#include "kpz/limit_law.hpp"

namespace kpzlab {

/// Malformed or inconsistent configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelSection {
  std::string kind = "two_sided_stationary";
  std::optional<double> rho;  ///< defaults to frame.rho
  double a = 0.25;
  double b = 0.25;
};

struct FrameSection {
  double T = 1000.0;
  double rho = 0.5;
  double nu = 0.5;
};

struct SGrid {
  double lo = -4.0;
  double hi = 4.0;
  double step = 0.5;
};

struct SpecSection {
  std::vector<double> taus{0.0};
  std::vector<double> s{0.0};
  double theta = 0.0;
  std::optional<SGrid> s_grid;                 ///< sweep, every s_k set to the grid value
  std::vector<std::vector<double>> points;     ///< explicit s-vectors
};

struct CompareSection {
  kpz::McVsLimitOptions options;
  std::vector<double> trend_T;                 ///< empty: no trend run
  std::vector<std::uint64_t> trend_seeds{1, 2, 3};
};

struct ValidateSection {
  struct Burke {
    bool enabled = true;
    double rho = 0.5;
    double duration = 20000.0;
    std::int64_t queues = 1000;
    double p_threshold = 0.01;
  } burke;
  struct Shift {
    bool enabled = true;
    double a = 0.25;
    double b = 0.25;
    std::vector<std::vector<kpz::LatticePoint>> grids{{{2, 2}}, {{2, 1}, {1, 2}}};
    std::size_t n_samples = 1'000'000;
    double threshold = 0.02;
    std::size_t coupling_instances = 100000;
    kpz::LatticePoint coupling_point{3, 3};
  } shift;
  struct Slow {
    bool enabled = true;
    double T = 2000.0;
    double rho = 0.5;
    double nu = 0.5;
    double c1 = 0.25;
    double c2 = 0.25;
    double theta = 1.0;
    double beta = 0.25;
    double control_beta = 0.1;
    std::size_t n_samples = 2000;
    double threshold = 0.95;
    double control_ceiling = 0.9;
  } slow;
  struct Gaussian {
    bool enabled = true;
    double rho = 0.5;
    std::vector<double> gammas{4.0, 0.25};
    double N = 2000.0;
    std::size_t n_samples = 5000;
    double ks_threshold = 0.05;
    std::string reading = "calibrated";
    bool control = true;
    double control_p = 0.01;
  } gaussian;
  struct Bridge {
    bool enabled = true;
    std::size_t instances = 10000;
    std::int64_t max_grid = 20;
    int time_points = 50;
  } bridge;
  struct Dual {
    bool enabled = true;
    double threshold = 1e-8;
  } kernel_dual;
  struct Invertibility {
    bool enabled = true;
    std::vector<std::vector<double>> taus{{0.0}, {-1.0, 1.0}, {-1.0, 0.0, 1.0}};
    std::vector<double> s_values{-3.0, -1.0, 0.0, 2.0, 5.0};
  } invertibility;
};

struct RunConfig {
  std::string subcommand;
  ModelSection model;
  FrameSection frame;
  SpecSection spec;
  kpz::QuadratureConfig quadrature;
  std::size_t n_samples = 20000;
  std::uint64_t master_seed = 1;
  std::size_t threads = 0;  ///< 0: THREADS or hardware concurrency
  std::string output_dir = ".";
  CompareSection compare;
  ValidateSection validate;
};

/// Parses and validates `doc` for `subcommand`. Unknown keys, wrong types and
/// out-of-range values throw ConfigError. An explicit "subcommand" member must
/// match.
RunConfig parse_config(const nlohmann::json& doc, const std::string& subcommand);

/// The fully resolved configuration, every default explicit.
nlohmann::json to_json(const RunConfig& config);

kpz::ModelParams model_params(const RunConfig& config);

}  // namespace kpzlab
