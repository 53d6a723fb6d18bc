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
#include <span>
#include <string>
#include <vector>

#include "spikediff/diffusion.hpp"
#include "spikediff/spike_model.hpp"

namespace spikediff {

struct MetricRecord {
  std::string metric_id;
  double t = 0.0;
  std::string estimator_id;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

struct CurveResult {
  std::vector<double> grid;
  std::vector<MetricRecord> records;  // records[i] belongs to grid[i]
};

struct NamedFactory {
  std::string id;
  DenoiserFactory make;
};

// Monte Carlo MSE E‖m̂(y_t, t) − x‖²_F per grid point. All estimators see
// the same (x, y_t) pairs: trial r at grid point i draws from
// stream.split(i).split(r), and each estimator's internal stream is keyed by
// its id, so adding or reordering estimators does not change any curve.
std::vector<CurveResult> mse_curves(const std::vector<NamedFactory>& estimators,
                                    const TargetDistribution& dist,
                                    const std::vector<double>& grid,
                                    std::size_t trials, const NoiseStream& stream,
                                    std::size_t threads = 1);

CurveResult mse_curve(const NamedFactory& estimator, const TargetDistribution& dist,
                      const std::vector<double>& grid, std::size_t trials,
                      const NoiseStream& stream, std::size_t threads = 1);

inline constexpr double kRecoveryTol = 1e-12;

// Fraction of trials with max_ij |m̂_ij − x_ij| ≤ kRecoveryTol.
MetricRecord recovery_rate(const NamedFactory& estimator, const TargetDistribution& dist,
                           double t, std::size_t trials, const NoiseStream& stream,
                           std::size_t threads = 1);

struct ScoreDistance {
  double value = 0.0;
  double stderr_ = 0.0;
  std::vector<double> pointwise;  // E‖d1 − d2‖²_F at each grid point
  std::size_t trials = 0;
};

// Trapezoid integral over `grid` of t ↦ E‖d1(y_t, t) − d2(y_t, t)‖²_F along
// one observe_path per trial. Both denoisers receive the same internal
// stream, which makes the result symmetric in (d1, d2).
ScoreDistance score_distance_integral(const DenoiserFactory& d1,
                                      const DenoiserFactory& d2,
                                      const TargetDistribution& dist,
                                      const std::vector<double>& grid,
                                      std::size_t trials, const NoiseStream& stream,
                                      std::size_t threads = 1);

// A fixed 1-Lipschitz statistic on matrices (w.r.t. the Frobenius norm).
struct LipschitzStatistic {
  enum class Kind { kFrobeniusNorm, kInnerProduct };
  Kind kind = Kind::kFrobeniusNorm;
  Matrix direction;  // used by kInnerProduct; normalized internally

  static LipschitzStatistic frobenius() { return {}; }
  static LipschitzStatistic inner_product(Matrix d) {
    return {Kind::kInnerProduct, std::move(d)};
  }
  double operator()(const Matrix& m) const;
  std::string name() const;
};

struct W1Bound {
  double bound = 0.0;
  double stderr_ = 0.0;
  double mean_a = 0.0;
  double mean_b = 0.0;
};

// |E f(a) − E f(b)| ≤ W₁(a, b) for the 1-Lipschitz statistic f.
W1Bound w1_lower_bound(std::span<const Matrix> a, std::span<const Matrix> b,
                       const LipschitzStatistic& f);
// Same bound from statistic values computed upstream.
W1Bound w1_from_statistics(std::span<const double> fa, std::span<const double> fb);

// max over probes of ‖m̂(y+h, t) − m̂(y, t)‖_F / ‖h‖_F, with y = √t·G and h a
// Gaussian direction scaled to ‖h‖_F = radius.
double lipschitz_probe(Denoiser& denoiser, double t, std::size_t n_probes,
                       double radius, const NoiseStream& stream);

// Bisects the segment [y0, y1] down to length ≤ radius while keeping
// m̂(y_lo) ≠ m̂(y_hi), then returns that pair's difference ratio. Empty when
// the endpoints already agree.
std::optional<double> lipschitz_straddle(Denoiser& denoiser, const Matrix& y0,
                                         const Matrix& y1, double t, double radius);

// Nearest-atom classifier: a matrix within Frobenius distance `radius` of an
// atom maps to that atom's index, otherwise to other_index().
class AtomSnapper {
 public:
  explicit AtomSnapper(std::vector<SymMatrix> atoms, double radius = 0.5);
  // Distinct u uᵀ over B_{n,k} (u and −u coincide), in enumeration order,
  // followed by the zero matrix.
  static AtomSnapper spikes_and_zero(std::size_t n, std::size_t k, double radius = 0.5);

  std::size_t snap(const Matrix& m) const;
  std::size_t other_index() const noexcept { return atoms_.size(); }
  std::size_t categories() const noexcept { return atoms_.size() + 1; }
  const std::vector<SymMatrix>& atoms() const noexcept { return atoms_; }

 private:
  std::vector<SymMatrix> atoms_;
  double radius_;
};

// Exact posterior P(x = atom | y) on the snapper's categories.
std::vector<double> snapped_posterior(const BayesOracleDenoiser& oracle,
                                      const Matrix& y, const AtomSnapper& snapper);

// Empirical category frequencies of the snapped samples.
std::vector<double> snapped_frequencies(std::span<const Matrix> samples,
                                        const AtomSnapper& snapper);

// ½ Σ |p_a − p_b| over a common finite support.
double tv_discrete(std::span<const double> p_a, std::span<const double> p_b);

// Trapezoid rule over (xs, ys).
double trapezoid(std::span<const double> xs, std::span<const double> ys);

}  // namespace spikediff
