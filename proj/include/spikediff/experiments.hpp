// Copyright 2026 The spikediff Authors.
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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "spikediff/diffusion.hpp"
#include "spikediff/metrics.hpp"
#include "spikediff/spike_model.hpp"

namespace spikediff {

inline constexpr int kSchemaVersion = 1;

// Library version with the build's git description appended.
const char* version_string();

struct GridSpec {
  std::string kind;  // linear | log | explicit
  double lo = 0.0;
  double hi = 0.0;
  std::size_t points = 0;
  std::vector<double> values;  // explicit grids
  bool inject_thresholds = true;
};

struct ExperimentConfig {
  std::string experiment;
  std::size_t n = 0;
  std::size_t k = 0;
  TargetKind target = TargetKind::kSpiked;
  std::vector<nlohmann::json> denoisers;
  std::optional<GridSpec> grid;
  std::size_t trials = 0;
  double delta = 0.0;
  double t_max = 0.0;
  std::uint64_t seed = 0;
  std::string output;
  // generate
  std::size_t target_samples = 0;
  // reduction
  double sigma = 0.0;
  double theta = 0.0;
  std::size_t repeats = 0;
  // cheat-demo uniformity check
  std::size_t chi_n = 6;
  std::size_t chi_k = 2;
  std::size_t chi_draws = 100000;
  double enum_cap = kDefaultEnumerationCap;
};

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> enum_cap;
  std::optional<std::string> output;
};

// Validates a config document and fills defaults. Unknown keys, missing
// required keys and out-of-range values raise ConfigError. When `subcommand`
// is non-empty it must agree with (or supplies) the "experiment" field.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::string& subcommand,
                              const RunOverrides& overrides = {});

// The fully resolved config as written into output headers.
nlohmann::json resolved_json(const ExperimentConfig& config);

// Grid points sorted ascending, with t_alg and t_bayes inserted when they
// fall inside [lo, hi] and injection is enabled.
std::vector<double> resolve_grid(const GridSpec& grid, std::size_t n, std::size_t k);

// Denoiser from a spec such as {"id": "alg1", "epsilon": 0.6}. The optional
// "label" key renames the estimator in outputs. "cheat" needs the
// diffusion's first noise matrix and is rejected here.
NamedFactory make_factory(const nlohmann::json& spec, std::size_t n, std::size_t k,
                          double enum_cap = kDefaultEnumerationCap);

// Writes the experiment's artifact (CSV for mse-curve, oracle-phase and
// generate; JSON for reduction and cheat-demo) to `out`.
void run_experiment(const ExperimentConfig& config, std::ostream& out,
                    std::size_t threads = 1);

}  // namespace spikediff
