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

#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "spikediff/denoisers.hpp"
#include "spikediff/diffusion.hpp"
#include "spikediff/error.hpp"
#include "spikediff/spike_model.hpp"
#include "spikediff/stats.hpp"

namespace spikediff {
namespace {

class ConstantDrift final : public Denoiser {
 public:
  explicit ConstantDrift(SymMatrix m) : m_(std::move(m)) {}
  std::string id() const override { return "constant"; }
  std::size_t dim() const override { return m_.dim(); }
  SymMatrix evaluate(const Matrix&, double) override { return m_; }

 private:
  SymMatrix m_;
};

class NanDrift final : public Denoiser {
 public:
  std::string id() const override { return "nan"; }
  std::size_t dim() const override { return 3; }
  SymMatrix evaluate(const Matrix&, double t) override {
    return SymMatrix::identity(3).scaled(t > 1.0 ? std::nan("") : 0.0);
  }
};

DiffusionConfig config(std::size_t n, double delta, double t_max) {
  DiffusionConfig c;
  c.n = n;
  c.delta = delta;
  c.t_max = t_max;
  return c;
}

TEST(StepCount, RoundsUpAndAbsorbsRepresentationError) {
  EXPECT_EQ(step_count(config(3, 3.5, 1400.0)), 400u);
  EXPECT_EQ(step_count(config(3, 0.1, 0.3)), 3u);
  EXPECT_EQ(step_count(config(3, 1.0, 2.5)), 3u);
  EXPECT_EQ(step_count(config(3, 1.0, 0.0)), 0u);
  EXPECT_THROW(step_count(config(3, 0.0, 1.0)), InvalidArgument);
  EXPECT_THROW(step_count(config(0, 1.0, 1.0)), InvalidArgument);
  DiffusionConfig bad = config(3, 1.0, 1.0);
  bad.t_start = 2.0;
  EXPECT_THROW(step_count(bad), InvalidArgument);
}

TEST(LogSpacedSteps, EndpointsAndOrder) {
  const auto s = log_spaced_steps(400, 10);
  EXPECT_EQ(s.front(), 1u);
  EXPECT_EQ(s.back(), 400u);
  for (std::size_t i = 1; i < s.size(); ++i) EXPECT_LT(s[i - 1], s[i]);
  EXPECT_TRUE(log_spaced_steps(0, 5).empty());
}

TEST(Euler, NullDriftMarginalVariance) {
  // ŷ after ℓ steps is a sum of ℓ independent N(0, Δ) increments.
  const double delta = 0.5;
  const std::size_t steps = 6;
  DiffusionConfig c = config(3, delta, delta * steps);
  c.record_steps = {2};
  NullDenoiser null(3);
  std::vector<double> at2;
  std::vector<double> at6;
  for (int r = 0; r < 10000; ++r) {
    const DiffusionRun run = euler_sample(null, c, NoiseStream(1).split(r));
    ASSERT_EQ(run.times.size(), 2u);
    at2.push_back(run.states[0](0, 1));
    at6.push_back(run.states[1](0, 1));
  }
  for (const auto& [xs, var] : {std::pair{at2, 1.0}, std::pair{at6, 3.0}}) {
    const MeanStderr m = mean_stderr(xs);
    EXPECT_NEAR(m.mean, 0.0, 4.0 * std::sqrt(var / 10000.0));
    double sq = 0.0;
    for (double x : xs) sq += x * x;
    EXPECT_NEAR(sq / 10000.0, var, 4.0 * var * std::sqrt(2.0 / 10000.0));
  }
}

TEST(Euler, ConstantDriftMean) {
  Matrix m(2, 2);
  m << 0.3, -0.2, -0.2, 0.1;
  ConstantDrift drift(SymMatrix::from_symmetric(m));
  const DiffusionConfig c = config(2, 0.25, 2.0);
  Matrix acc = Matrix::Zero(2, 2);
  const int trials = 4000;
  for (int r = 0; r < trials; ++r) acc += euler_sample(drift, c, NoiseStream(2).split(r)).states.back();
  // Var of each entry is 2, so the mean's stderr is sqrt(2 / trials).
  EXPECT_LE((acc / trials - 2.0 * m).cwiseAbs().maxCoeff(), 4.0 * std::sqrt(2.0 / trials));
}

TEST(Euler, NoiseIsStepIndexed) {
  // With zero drift the state is exactly the sum of the step noises.
  NullDenoiser null(4);
  const NoiseStream s(3);
  const DiffusionRun run = euler_sample(null, config(4, 1.0, 3.0), s);
  const Matrix expect = step_noise(4, 0, s) + step_noise(4, 1, s) + step_noise(4, 2, s);
  EXPECT_LE((run.states.back() - expect).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(first_noise_draw(4, s), step_noise(4, 0, s));
}

TEST(Euler, ReplayIsBitIdentical) {
  const std::size_t n = 30;
  SpectralDenoiser a(Alg1Params::defaults(n, 4));
  SpectralDenoiser b(Alg1Params::defaults(n, 4));
  DiffusionConfig c = config(n, 1.5, 120.0);
  c.record_steps = log_spaced_steps(step_count(c), 5);
  c.log_drift = true;
  const DiffusionRun r1 = euler_sample(a, c, NoiseStream(4));
  const DiffusionRun r2 = euler_sample(b, c, NoiseStream(4));
  ASSERT_EQ(r1.states.size(), r2.states.size());
  for (std::size_t i = 0; i < r1.states.size(); ++i) EXPECT_EQ(r1.states[i], r2.states[i]);
  EXPECT_EQ(r1.drift_log, r2.drift_log);
  EXPECT_EQ(r1.drift_log.size(), r1.steps);
  EXPECT_EQ(r1.final_sample.matrix(), r2.final_sample.matrix());
}

TEST(Euler, NonFiniteDriftIsNumericalError) {
  NanDrift d;
  EXPECT_THROW(euler_sample(d, config(3, 1.0, 5.0), NoiseStream(5)), NumericalError);
}

TEST(Euler, DimensionMismatch) {
  NullDenoiser d(4);
  EXPECT_THROW(euler_sample(d, config(3, 1.0, 5.0), NoiseStream(5)), InvalidArgument);
}

TEST(ExactSampler, ConvergesToTarget) {
  const std::size_t n = 20;
  NoiseStream s(6);
  const SparseSpike u = sample_spike(n, 4, s);
  const SymMatrix x = u.matrix();
  const double horizon = 1e4;
  int within = 0;
  for (int r = 0; r < 100; ++r) {
    const DiffusionRun run = exact_sampler_demo(x, config(n, 100.0, horizon), NoiseStream(7).split(r));
    const double err = (run.states.back() / run.t_end - x.matrix()).norm();
    within += err <= 2.0 * n / std::sqrt(horizon) * 1.1 ? 1 : 0;
  }
  EXPECT_GE(within, 95);
}

TEST(ExactSampler, SinglePointMatchesObservePath) {
  const SymMatrix x = spike_matrix(SparseSpike(5, {1, 4}, {1, -1}));
  const NoiseStream s(8);
  const DiffusionRun run = exact_sampler_demo(x, config(5, 2.0, 2.0), s);
  NoiseStream path = s.split("exact");
  const auto obs = observe_path(x, {2.0}, path);
  EXPECT_EQ(run.states.back(), obs[0].y);
  EXPECT_EQ(run.final_sample.matrix(), symmetrize(obs[0].y, 4.0).matrix());
}

TEST(ExactSampler, ResidualVariance) {
  // Off-diagonal of (y_t − t x + (y_t − t x)ᵀ)/2 has variance t/2.
  const SymMatrix x = spike_matrix(SparseSpike(4, {0, 1}, {1, 1}));
  const double t = 3.0;
  std::vector<double> vals;
  for (int r = 0; r < 10000; ++r) {
    const DiffusionRun run = exact_sampler_demo(x, config(4, t, t), NoiseStream(9).split(r));
    const Matrix res = run.states.back() - t * x.matrix();
    vals.push_back(0.5 * (res(0, 2) + res(2, 0)));
  }
  double sq = 0.0;
  for (double v : vals) sq += v * v;
  EXPECT_NEAR(sq / 10000.0, t / 2.0, 4.0 * (t / 2.0) * std::sqrt(2.0 / 10000.0));
}

TEST(Reduction, WarmStartTime) {
  // σ = 0.5 → t0 = 4; with T = t0 and the null drift the output is y itself.
  const Matrix y = Matrix::Constant(2, 2, 0.7);
  NullDenoiser d(2);
  const Matrix out = reduction_sample(y, d, {0.5, 1.0, 1.0, 1}, NoiseStream(10));
  EXPECT_LE((out - y).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(reduction_sample(y, d, {0.1, 1.0, 1.0, 1}, NoiseStream(10)), ConfigError);
  EXPECT_THROW(reduction_sample(y, d, {0.0, 1.0, 1.0, 1}, NoiseStream(10)), ConfigError);
}

TEST(Reduction, SingleRepeatEqualsSample) {
  const NoiseStream s(11);
  const Matrix y = Matrix::Identity(3, 3);
  const ReductionConfig rc{0.5, 2.0, 0.5, 1};
  DenoiserFactory factory = [](NoiseStream) { return std::make_unique<NullDenoiser>(3); };
  NullDenoiser d(3);
  EXPECT_EQ(posterior_mean_estimate(y, factory, rc, s), reduction_sample(y, d, rc, s.split(0)));
}

TEST(Reduction, CheatDriftConvergesToSpike) {
  const std::size_t n = 8;
  NoiseStream s(12);
  const Matrix y = gaussian_matrix(n, s);
  const Matrix z1 = gaussian_matrix(n, s);
  CheatDenoiser d(z1, 2);
  const SymMatrix target = d.spike().matrix();
  std::vector<double> errs;
  for (double theta : {1.0, 16.0, 256.0}) {
    const Matrix out = reduction_sample(y, d, {1.0, theta, 4.0, 1}, NoiseStream(13));
    errs.push_back((out - target.matrix()).norm());
  }
  EXPECT_LT(errs[2], errs[0]);
  EXPECT_LE(errs[2], 2.0 * n / std::sqrt(256.0 * n * n) + 8.0 * 2.0 / (256.0 * n * n));
}

TEST(Reduction, MatchesBruteForcePosteriorMean) {
  const std::size_t n = 6;
  const std::size_t k = 2;
  const double sigma = 0.6;
  NoiseStream s(14);
  const SparseSpike u = sample_spike(n, k, s);
  const double t0 = 1.0 / (sigma * sigma);
  const Observation obs = observe_single(u.matrix(), t0, s);
  const Matrix y = obs.y / t0;
  BayesOracleDenoiser oracle(n, k);
  const Matrix truth = oracle.evaluate(obs.y, t0).matrix();
  DenoiserFactory factory = [](NoiseStream) { return std::make_unique<BayesOracleDenoiser>(6, 2); };
  const Matrix est = posterior_mean_estimate(y, factory, {sigma, 25.0, 0.25, 500}, NoiseStream(15));
  EXPECT_LE((est - truth).norm() / truth.norm(), 0.15);
}

TEST(Reduction, AveragingVarianceShrinks) {
  // Regress log Var(mean of N samples) on log N: slope ≈ −1.
  const Matrix y = Matrix::Constant(3, 3, 0.2);
  DenoiserFactory factory = [](NoiseStream) { return std::make_unique<NullDenoiser>(3); };
  const ReductionConfig base{1.0, 1.0, 1.0, 1};
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t reps : {1, 4, 16, 64}) {
    ReductionConfig rc = base;
    rc.repeats = reps;
    std::vector<double> entry;
    for (int r = 0; r < 400; ++r) {
      entry.push_back(posterior_mean_estimate(y, factory, rc, NoiseStream(16).split(r))(0, 1));
    }
    const MeanStderr m = mean_stderr(entry);
    lx.push_back(std::log(static_cast<double>(reps)));
    ly.push_back(std::log(m.stderr_ * m.stderr_ * 400.0));
  }
  const double mx = (lx[0] + lx[1] + lx[2] + lx[3]) / 4.0;
  const double my = (ly[0] + ly[1] + ly[2] + ly[3]) / 4.0;
  double num = 0.0;
  double den = 0.0;
  for (int i = 0; i < 4; ++i) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  EXPECT_NEAR(num / den, -1.0, 0.2);
}

TEST(Reduction, ThreadCountDoesNotChangeResult) {
  const Matrix y = Matrix::Constant(4, 4, 0.1);
  DenoiserFactory factory = [](NoiseStream s) {
    return std::make_unique<SpectralDenoiser>(Alg1Params::defaults(4, 2), 5, s);
  };
  const ReductionConfig rc{0.5, 3.0, 0.5, 7};
  EXPECT_EQ(posterior_mean_estimate(y, factory, rc, NoiseStream(17), 1),
            posterior_mean_estimate(y, factory, rc, NoiseStream(17), 3));
}

}  // namespace
}  // namespace spikediff
