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
#include <span>
#include <vector>

namespace spikediff {

// Neumaier-compensated accumulator. Results depend only on the order of
// add() calls, which callers keep canonical (by trial index).
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_sum(std::span<const double> xs);

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;  // sample std / √count
  std::size_t count = 0;
};

// Two-pass mean and standard error with compensated sums. A sample of
// identical values gives stderr exactly 0.
MeanStderr mean_stderr(std::span<const double> xs);

// Upper-tail p-value of Pearson's χ² statistic for `observed` counts
// against `expected` probabilities (which must sum to 1).
double chi_squared_uniformity_pvalue(std::span<const std::size_t> observed,
                                     std::span<const double> expected);

struct KsResult {
  double statistic = 0.0;   // sup |F_a − F_b|
  double critical = 0.0;    // rejection threshold at the requested level
  bool reject = false;
};

// Two-sample Kolmogorov–Smirnov test with the large-sample critical value
// c(α)·√((n+m)/(nm)), c(α) = √(−ln(α/2)/2).
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b,
                       double alpha);

}  // namespace spikediff
