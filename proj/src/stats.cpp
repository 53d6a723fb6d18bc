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

#include "spikediff/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "spikediff/error.hpp"

namespace spikediff {

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

double compensated_sum(std::span<const double> xs) {
  CompensatedSum acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

MeanStderr mean_stderr(std::span<const double> xs) {
  MeanStderr out;
  out.count = xs.size();
  if (xs.empty()) return out;
  out.mean = compensated_sum(xs) / static_cast<double>(xs.size());
  if (xs.size() < 2) return out;
  CompensatedSum ss;
  for (double x : xs) {
    const double d = x - out.mean;
    ss.add(d * d);
  }
  const double n = static_cast<double>(xs.size());
  const double var = ss.value() / (n - 1.0);
  out.stderr_ = std::sqrt(var / n);
  return out;
}

double chi_squared_uniformity_pvalue(std::span<const std::size_t> observed,
                                     std::span<const double> expected) {
  if (observed.size() != expected.size() || observed.size() < 2) {
    throw InvalidArgument("chi-squared: need matching category counts >= 2");
  }
  double total = 0.0;
  for (std::size_t c : observed) total += static_cast<double>(c);
  if (total <= 0.0) throw InvalidArgument("chi-squared: no observations");
  if (std::abs(compensated_sum(expected) - 1.0) > 1e-9) {
    throw InvalidArgument("chi-squared: expected probabilities must sum to 1");
  }
  CompensatedSum stat;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = expected[i] * total;
    if (!(e > 0.0)) throw InvalidArgument("chi-squared: expected count must be positive");
    const double d = static_cast<double>(observed[i]) - e;
    stat.add(d * d / e);
  }
  const boost::math::chi_squared dist(static_cast<double>(observed.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat.value()));
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b,
                       double alpha) {
  if (a.empty() || b.empty()) throw InvalidArgument("ks: empty sample");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("ks: alpha in (0,1)");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  KsResult r;
  r.statistic = d;
  r.critical = std::sqrt(-std::log(alpha / 2.0) / 2.0) *
               std::sqrt((na + nb) / (na * nb));
  r.reject = d > r.critical;
  return r;
}

}  // namespace spikediff
