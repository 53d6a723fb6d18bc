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
#include "spikediff/metrics.hpp"
#include "spikediff/spike_model.hpp"

namespace spikediff {
namespace {

NamedFactory null_factory(std::size_t n) {
  return {"null", [n](NoiseStream) { return std::make_unique<NullDenoiser>(n); }};
}

NamedFactory alg1_factory(std::size_t n, std::size_t k) {
  return {"alg1", [n, k](NoiseStream) {
            return std::make_unique<SpectralDenoiser>(Alg1Params::defaults(n, k));
          }};
}

NamedFactory bayes_factory(std::size_t n, std::size_t k) {
  return {"bayes", [n, k](NoiseStream) { return std::make_unique<BayesOracleDenoiser>(n, k); }};
}

TEST(MseCurve, NullIsExactlyOne) {
  const CurveResult c =
      mse_curve(null_factory(30), {TargetKind::kSpiked, 30, 7}, {1.0, 10.0, 100.0}, 50,
                NoiseStream(1));
  ASSERT_EQ(c.records.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(c.records[i].mean, 1.0);
    EXPECT_EQ(c.records[i].stderr_, 0.0);
    EXPECT_EQ(c.records[i].trials, 50u);
    EXPECT_EQ(c.records[i].t, c.grid[i]);
    EXPECT_EQ(c.records[i].estimator_id, "null");
  }
}

TEST(MseCurve, NullOnMixtureMatchesSecondMoment) {
  const std::size_t n = 10;
  const CurveResult c =
      mse_curve(null_factory(n), {TargetKind::kMixture, n, 3}, {5.0}, 4000, NoiseStream(2));
  // E‖x‖² = ½ (1 − 1/n) for the centred-spike / zero mixture.
  EXPECT_NEAR(c.records[0].mean, 0.5 * (1.0 - 1.0 / n), 4.0 * c.records[0].stderr_);
}

TEST(MseCurve, Alg1BelowThresholdIsExactlyOne) {
  const std::size_t n = 60;
  const std::size_t k = 5;
  const double ta = t_alg(n, k);
  const CurveResult c = mse_curve(alg1_factory(n, k), {TargetKind::kSpiked, n, k},
                                  {0.2 * ta, 0.5 * ta, 0.99 * ta}, 30, NoiseStream(3));
  for (const auto& r : c.records) {
    EXPECT_EQ(r.mean, 1.0);
    EXPECT_EQ(r.stderr_, 0.0);
  }
}

TEST(MseCurve, BayesBelowPointTwoAboveThreshold) {
  const CurveResult c = mse_curve(bayes_factory(8, 2), {TargetKind::kSpiked, 8, 2},
                                  {5.0 * t_bayes(8, 2)}, 500, NoiseStream(4));
  EXPECT_LE(c.records[0].mean, 0.2);
}

TEST(MseCurve, BayesAtTimeZero) {
  // m̂ = I/n, so E‖I/n − x‖² = 1 − 1/n.
  const CurveResult c = mse_curve(bayes_factory(6, 2), {TargetKind::kSpiked, 6, 2}, {0.0},
                                  20, NoiseStream(5));
  EXPECT_NEAR(c.records[0].mean, 1.0 - 1.0 / 6.0, 1e-12);
}

TEST(MseCurve, Validation) {
  const TargetDistribution d{TargetKind::kSpiked, 6, 2};
  EXPECT_THROW(mse_curve(null_factory(6), d, {1.0}, 1, NoiseStream(6)), InvalidArgument);
  EXPECT_THROW(mse_curve(null_factory(6), d, {2.0, 1.0}, 5, NoiseStream(6)), InvalidArgument);
}

TEST(MseCurves, EstimatorSetDoesNotChangeCurves) {
  const TargetDistribution d{TargetKind::kSpiked, 24, 3};
  const std::vector<double> grid{20.0, 60.0, 200.0};
  const NoiseStream s(7);
  const auto both = mse_curves({null_factory(24), alg1_factory(24, 3)}, d, grid, 12, s);
  const auto alone = mse_curves({alg1_factory(24, 3)}, d, grid, 12, s);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_EQ(both[1].records[i].mean, alone[0].records[i].mean);
    EXPECT_EQ(both[1].records[i].stderr_, alone[0].records[i].stderr_);
  }
}

TEST(MseCurves, ThreadCountDoesNotChangeCurves) {
  const TargetDistribution d{TargetKind::kCenteredSpiked, 24, 3};
  const std::vector<double> grid{20.0, 60.0, 200.0};
  NamedFactory power{"power25", [](NoiseStream s) {
                       return std::make_unique<SpectralDenoiser>(Alg1Params::defaults(24, 3),
                                                                 25, s);
                     }};
  const auto one = mse_curves({power, alg1_factory(24, 3)}, d, grid, 16, NoiseStream(8), 1);
  const auto four = mse_curves({power, alg1_factory(24, 3)}, d, grid, 16, NoiseStream(8), 4);
  for (std::size_t e = 0; e < 2; ++e) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      EXPECT_EQ(one[e].records[i].mean, four[e].records[i].mean);
      EXPECT_EQ(one[e].records[i].stderr_, four[e].records[i].stderr_);
    }
  }
}

TEST(RecoveryRate, NullNeverRecovers) {
  const MetricRecord r =
      recovery_rate(null_factory(20), {TargetKind::kSpiked, 20, 3}, 100.0, 20, NoiseStream(9));
  EXPECT_EQ(r.mean, 0.0);
  EXPECT_EQ(r.metric_id, "recovery");
}

TEST(RecoveryRate, Alg2WellAboveGate) {
  const std::size_t n = 400;
  const std::size_t k = 6;
  NamedFactory alg2{"alg2", [](NoiseStream s) {
                      return std::make_unique<SplitSpectralDenoiser>(
                          Alg2Params::defaults(400, 6), SplitNoiseMode::kFresh, s);
                    }};
  const MetricRecord r = recovery_rate(alg2, {TargetKind::kSpiked, n, k}, 40.0 * t_alg(n, k),
                                       30, NoiseStream(10));
  EXPECT_GE(r.mean, 0.9);
}

TEST(ScoreDistance, SameDenoiserIsZero) {
  const std::size_t n = 30;
  const std::size_t k = 4;
  NamedFactory power{"power25", [](NoiseStream s) {
                       return std::make_unique<SpectralDenoiser>(Alg1Params::defaults(30, 4),
                                                                 25, s);
                     }};
  const ScoreDistance d = score_distance_integral(
      power.make, power.make, {TargetKind::kSpiked, n, k}, {10.0, 50.0, 120.0, 400.0}, 10,
      NoiseStream(11));
  EXPECT_EQ(d.value, 0.0);
  EXPECT_EQ(d.stderr_, 0.0);
}

TEST(ScoreDistance, NullVersusAlg1BelowThreshold) {
  const std::size_t n = 50;
  const std::size_t k = 5;
  const double ta = t_alg(n, k);
  const ScoreDistance d = score_distance_integral(
      null_factory(n).make, alg1_factory(n, k).make, {TargetKind::kSpiked, n, k},
      {0.1 * ta, 0.5 * ta, 0.9 * ta}, 10, NoiseStream(12));
  EXPECT_EQ(d.value, 0.0);
}

TEST(ScoreDistance, NullVersusCheatIsGridLength) {
  // ‖0 − x_cheat‖² = 1 at every t, so the integral is t_hi − t_lo.
  const std::size_t n = 8;
  DenoiserFactory cheat = [](NoiseStream s) {
    return std::make_unique<CheatDenoiser>(gaussian_matrix(8, s), 2);
  };
  const ScoreDistance d = score_distance_integral(
      null_factory(n).make, cheat, {TargetKind::kSpiked, n, 2}, {1.0, 2.5, 7.0}, 5,
      NoiseStream(13));
  EXPECT_NEAR(d.value, 6.0, 1e-12);
}

TEST(ScoreDistance, CompositeTracksAlg1AboveThreshold) {
  const std::size_t n = 200;
  const std::size_t k = 20;
  const double ta = t_alg(n, k);
  std::vector<double> grid;
  for (int i = 0; i < 25; ++i) grid.push_back(1.05 * ta + (4.0 * n - 1.05 * ta) * i / 24.0);
  DenoiserFactory composite = [](NoiseStream) {
    return std::make_unique<CompositeDenoiser>(
        std::make_unique<SpectralDenoiser>(Alg1Params::defaults(200, 20)), 20);
  };
  const ScoreDistance d = score_distance_integral(
      composite, alg1_factory(n, k).make, {TargetKind::kSpiked, n, k}, grid, 10, NoiseStream(14));
  EXPECT_LE(d.value, 0.01);
}

TEST(W1, IdenticalSamplesGiveZero) {
  NoiseStream s(15);
  std::vector<Matrix> a;
  for (int i = 0; i < 20; ++i) a.push_back(gaussian_matrix(4, s));
  EXPECT_EQ(w1_lower_bound(a, a, LipschitzStatistic::frobenius()).bound, 0.0);
  EXPECT_THROW(w1_lower_bound(a, {}, LipschitzStatistic::frobenius()), InvalidArgument);
}

TEST(W1, TranslationOracle) {
  NoiseStream s(16);
  Matrix c = Matrix::Zero(4, 4);
  c(0, 1) = 0.3;
  c(2, 2) = -0.4;
  std::vector<Matrix> a;
  std::vector<Matrix> b;
  for (int i = 0; i < 2000; ++i) {
    a.push_back(gaussian_matrix(4, s));
    b.push_back(gaussian_matrix(4, s) + c);
  }
  const W1Bound w = w1_lower_bound(a, b, LipschitzStatistic::inner_product(c));
  EXPECT_NEAR(w.bound, 0.5, 4.0 * w.stderr_);
}

TEST(W1, FromStatistics) {
  const W1Bound w = w1_from_statistics(std::vector<double>{0.0, 0.0, 0.0},
                                       std::vector<double>{1.0, 1.0});
  EXPECT_EQ(w.bound, 1.0);
  EXPECT_EQ(w.stderr_, 0.0);
}

TEST(Lipschitz, NullIsZeroAndClippedIsBounded) {
  NullDenoiser null(10);
  EXPECT_EQ(lipschitz_probe(null, 5.0, 10, 0.1, NoiseStream(17)), 0.0);
  SpectralDenoiser alg1(Alg1Params::defaults(10, 3));
  EXPECT_LE(lipschitz_probe(alg1, 3.0 * t_alg(10, 3), 20, 0.01, NoiseStream(18)), 2.0 / 0.01);
  EXPECT_THROW(lipschitz_probe(null, 5.0, 1, 0.0, NoiseStream(17)), InvalidArgument);
}

TEST(Lipschitz, StraddleFindsAlg1Discontinuity) {
  const std::size_t n = 20;
  const std::size_t k = 4;
  SpectralDenoiser alg1(Alg1Params::defaults(n, k));
  const double t = 2.0 * t_alg(n, k);
  const SparseSpike u = SparseSpike(n, {0, 1, 2, 3}, {1, 1, 1, 1});
  const Matrix y1 = t * u.matrix().matrix();
  const Matrix y0 = Matrix::Zero(n, n);
  const auto ratio = lipschitz_straddle(alg1, y0, y1, t, 1e-3);
  ASSERT_TRUE(ratio.has_value());
  EXPECT_GT(*ratio, 10.0);
  EXPECT_FALSE(lipschitz_straddle(alg1, y1, y1, t, 1e-3).has_value());
}

TEST(Tv, PointMasses) {
  const std::vector<double> a{1.0, 0.0, 0.0};
  const std::vector<double> b{0.0, 0.0, 1.0};
  EXPECT_EQ(tv_discrete(a, a), 0.0);
  EXPECT_EQ(tv_discrete(a, b), 1.0);
  EXPECT_THROW(tv_discrete(a, std::vector<double>{1.0}), InvalidArgument);
}

TEST(AtomSnapper, SpikesAndZero) {
  const AtomSnapper snap = AtomSnapper::spikes_and_zero(6, 2);
  EXPECT_EQ(snap.atoms().size(), 31u);  // 15 supports × 2 sign classes + 0
  EXPECT_EQ(snap.categories(), 32u);
  EXPECT_EQ(snap.snap(Matrix::Zero(6, 6)), 30u);
  const SparseSpike u(6, {1, 4}, {-1, 1});
  const std::size_t i = snap.snap(u.matrix().matrix());
  EXPECT_LT(i, 30u);
  EXPECT_EQ(snap.atoms()[i].matrix(), u.matrix().matrix());
  EXPECT_EQ(snap.snap(SparseSpike(6, {1, 4}, {1, -1}).matrix().matrix()), i);
  EXPECT_EQ(snap.snap(Matrix::Identity(6, 6)), snap.other_index());
}

TEST(AtomSnapper, ExactSamplerMatchesPrior) {
  const std::size_t n = 6;
  const std::size_t k = 2;
  const AtomSnapper snap = AtomSnapper::spikes_and_zero(n, k);
  DiffusionConfig c;
  c.n = n;
  c.delta = 1e4;
  c.t_max = 1e4;
  std::vector<Matrix> samples;
  for (int r = 0; r < 10000; ++r) {
    NoiseStream s = NoiseStream(19).split(r);
    const SymMatrix x = sample_target({TargetKind::kSpiked, n, k}, s).x;
    samples.push_back(exact_sampler_demo(x, c, s).final_sample.matrix());
  }
  std::vector<double> truth(snap.categories(), 0.0);
  for (std::size_t a = 0; a < 30; ++a) truth[a] = 1.0 / 30.0;
  EXPECT_LE(tv_discrete(snapped_frequencies(samples, snap), truth), 0.05);
}

TEST(AtomSnapper, PosteriorAtTimeZeroIsUniform) {
  BayesOracleDenoiser oracle(6, 2);
  const AtomSnapper snap = AtomSnapper::spikes_and_zero(6, 2);
  const auto p = snapped_posterior(oracle, Matrix::Zero(6, 6), snap);
  ASSERT_EQ(p.size(), 32u);
  for (std::size_t a = 0; a < 30; ++a) EXPECT_NEAR(p[a], 1.0 / 30.0, 1e-15);
  EXPECT_EQ(p[30], 0.0);
  EXPECT_EQ(p[31], 0.0);
}

TEST(Trapezoid, Linear) {
  EXPECT_DOUBLE_EQ(trapezoid(std::vector<double>{0.0, 1.0, 3.0},
                             std::vector<double>{0.0, 2.0, 6.0}),
                   9.0);
}

}  // namespace
}  // namespace spikediff
