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

#include "spikediff/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spikediff/error.hpp"
#include "spikediff/parallel.hpp"
#include "spikediff/stats.hpp"

namespace spikediff {
namespace {

void require_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw InvalidArgument("metrics: empty time grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0) || !std::isfinite(grid[i])) {
      throw InvalidArgument("metrics: grid times must be finite and >= 0");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw InvalidArgument("metrics: grid must be strictly increasing");
    }
  }
}

void require_trials(std::size_t trials) {
  if (trials < 2) throw InvalidArgument("metrics: trials must be >= 2");
}

double squared_distance(const SymMatrix& a, const SymMatrix& b) {
  return frobenius_squared(Matrix(a.matrix() - b.matrix()));
}

MetricRecord make_record(std::string metric, double t, std::string id,
                         std::span<const double> values, std::uint64_t seed) {
  const MeanStderr ms = mean_stderr(values);
  return {std::move(metric), t, std::move(id), ms.mean, ms.stderr_, values.size(), seed};
}

}  // namespace

std::vector<CurveResult> mse_curves(const std::vector<NamedFactory>& estimators,
                                    const TargetDistribution& dist,
                                    const std::vector<double>& grid,
                                    std::size_t trials, const NoiseStream& stream,
                                    std::size_t threads) {
  require_grid(grid);
  require_trials(trials);
  const std::size_t ne = estimators.size();
  // errors[(g * trials + r) * ne + e]
  std::vector<double> errors(grid.size() * trials * ne);
  parallel_for(grid.size() * trials, threads, [&](std::size_t job) {
    const std::size_t g = job / trials;
    const std::size_t r = job % trials;
    const NoiseStream ts = stream.split(g).split(r);
    NoiseStream xs = ts.split("x");
    NoiseStream ys = ts.split("y");
    const TargetDraw draw = sample_target(dist, xs);
    const Observation obs = observe_single(draw.x, grid[g], ys);
    for (std::size_t e = 0; e < ne; ++e) {
      auto den = estimators[e].make(ts.split("den").split(estimators[e].id));
      errors[job * ne + e] = squared_error(den->evaluate(obs.y, obs.t), draw);
    }
  });

  std::vector<CurveResult> out(ne);
  std::vector<double> column(trials);
  for (std::size_t e = 0; e < ne; ++e) {
    out[e].grid = grid;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      for (std::size_t r = 0; r < trials; ++r) column[r] = errors[(g * trials + r) * ne + e];
      out[e].records.push_back(
          make_record("mse", grid[g], estimators[e].id, column, stream.master_seed()));
    }
  }
  return out;
}

CurveResult mse_curve(const NamedFactory& estimator, const TargetDistribution& dist,
                      const std::vector<double>& grid, std::size_t trials,
                      const NoiseStream& stream, std::size_t threads) {
  return mse_curves({estimator}, dist, grid, trials, stream, threads).front();
}

MetricRecord recovery_rate(const NamedFactory& estimator, const TargetDistribution& dist,
                           double t, std::size_t trials, const NoiseStream& stream,
                           std::size_t threads) {
  require_trials(trials);
  std::vector<double> hits(trials);
  parallel_for(trials, threads, [&](std::size_t r) {
    const NoiseStream ts = stream.split(r);
    NoiseStream xs = ts.split("x");
    NoiseStream ys = ts.split("y");
    const TargetDraw draw = sample_target(dist, xs);
    const Observation obs = observe_single(draw.x, t, ys);
    auto den = estimator.make(ts.split("den").split(estimator.id));
    const SymMatrix est = den->evaluate(obs.y, t);
    const double err = (est.matrix() - draw.x.matrix()).cwiseAbs().maxCoeff();
    hits[r] = err <= kRecoveryTol ? 1.0 : 0.0;
  });
  return make_record("recovery", t, estimator.id, hits, stream.master_seed());
}

double trapezoid(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw InvalidArgument("trapezoid: size mismatch");
  CompensatedSum acc;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    acc.add(0.5 * (xs[i] - xs[i - 1]) * (ys[i] + ys[i - 1]));
  }
  return acc.value();
}

ScoreDistance score_distance_integral(const DenoiserFactory& d1,
                                      const DenoiserFactory& d2,
                                      const TargetDistribution& dist,
                                      const std::vector<double>& grid,
                                      std::size_t trials, const NoiseStream& stream,
                                      std::size_t threads) {
  require_grid(grid);
  require_trials(trials);
  const std::size_t ng = grid.size();
  std::vector<double> sq(trials * ng);
  std::vector<double> integrals(trials);
  parallel_for(trials, threads, [&](std::size_t r) {
    const NoiseStream ts = stream.split(r);
    NoiseStream xs = ts.split("x");
    NoiseStream ps = ts.split("path");
    const TargetDraw draw = sample_target(dist, xs);
    const auto path = observe_path(draw.x, grid, ps);
    auto a = d1(ts.split("den"));
    auto b = d2(ts.split("den"));
    for (std::size_t g = 0; g < ng; ++g) {
      sq[r * ng + g] = squared_distance(a->evaluate(path[g].y, path[g].t),
                                        b->evaluate(path[g].y, path[g].t));
    }
    integrals[r] = trapezoid(grid, std::span<const double>(sq).subspan(r * ng, ng));
  });
  ScoreDistance out;
  const MeanStderr ms = mean_stderr(integrals);
  out.value = ms.mean;
  out.stderr_ = ms.stderr_;
  out.trials = trials;
  std::vector<double> column(trials);
  for (std::size_t g = 0; g < ng; ++g) {
    for (std::size_t r = 0; r < trials; ++r) column[r] = sq[r * ng + g];
    out.pointwise.push_back(compensated_sum(column) / static_cast<double>(trials));
  }
  return out;
}

double LipschitzStatistic::operator()(const Matrix& m) const {
  if (kind == Kind::kFrobeniusNorm) return std::sqrt(frobenius_squared(m));
  if (direction.rows() != m.rows() || direction.cols() != m.cols()) {
    throw InvalidArgument("w1: direction shape does not match the samples");
  }
  const double norm = std::sqrt(frobenius_squared(direction));
  if (!(norm > 0.0)) throw InvalidArgument("w1: direction must be nonzero");
  return direction.cwiseProduct(m).sum() / norm;
}

std::string LipschitzStatistic::name() const {
  return kind == Kind::kFrobeniusNorm ? "frobenius_norm" : "inner_product";
}

W1Bound w1_lower_bound(std::span<const Matrix> a, std::span<const Matrix> b,
                       const LipschitzStatistic& f) {
  if (a.empty() || b.empty()) throw InvalidArgument("w1: empty sample set");
  std::vector<double> fa;
  std::vector<double> fb;
  for (const auto& m : a) fa.push_back(f(m));
  for (const auto& m : b) fb.push_back(f(m));
  return w1_from_statistics(fa, fb);
}

W1Bound w1_from_statistics(std::span<const double> fa, std::span<const double> fb) {
  if (fa.empty() || fb.empty()) throw InvalidArgument("w1: empty sample set");
  const MeanStderr sa = mean_stderr(fa);
  const MeanStderr sb = mean_stderr(fb);
  W1Bound out;
  out.mean_a = sa.mean;
  out.mean_b = sb.mean;
  out.bound = std::abs(sa.mean - sb.mean);
  out.stderr_ = std::hypot(sa.stderr_, sb.stderr_);
  return out;
}

double lipschitz_probe(Denoiser& denoiser, double t, std::size_t n_probes,
                       double radius, const NoiseStream& stream) {
  if (!(radius > 0.0)) throw InvalidArgument("lipschitz: radius must be positive");
  const std::size_t n = denoiser.dim();
  double worst = 0.0;
  for (std::size_t p = 0; p < n_probes; ++p) {
    NoiseStream ys = stream.split(p).split("y");
    NoiseStream hs = stream.split(p).split("h");
    const Matrix y = std::sqrt(t) * gaussian_matrix(n, ys);
    Matrix h = gaussian_matrix(n, hs);
    h *= radius / std::sqrt(frobenius_squared(h));
    const SymMatrix m0 = denoiser.evaluate(y, t);
    const SymMatrix m1 = denoiser.evaluate(y + h, t);
    worst = std::max(worst, std::sqrt(squared_distance(m1, m0)) / radius);
  }
  return worst;
}

std::optional<double> lipschitz_straddle(Denoiser& denoiser, const Matrix& y0,
                                         const Matrix& y1, double t, double radius) {
  if (!(radius > 0.0)) throw InvalidArgument("lipschitz: radius must be positive");
  Matrix lo = y0;
  Matrix hi = y1;
  SymMatrix m_lo = denoiser.evaluate(lo, t);
  SymMatrix m_hi = denoiser.evaluate(hi, t);
  if (m_lo == m_hi) return std::nullopt;
  double len = std::sqrt(frobenius_squared(Matrix(hi - lo)));
  while (len > radius) {
    Matrix mid = 0.5 * (lo + hi);
    SymMatrix m_mid = denoiser.evaluate(mid, t);
    if (m_mid == m_lo) {
      lo = std::move(mid);
      m_lo = std::move(m_mid);
    } else {
      hi = std::move(mid);
      m_hi = std::move(m_mid);
    }
    len = std::sqrt(frobenius_squared(Matrix(hi - lo)));
  }
  return std::sqrt(squared_distance(m_hi, m_lo)) / len;
}

AtomSnapper::AtomSnapper(std::vector<SymMatrix> atoms, double radius)
    : atoms_(std::move(atoms)), radius_(radius) {
  if (!(radius_ > 0.0)) throw InvalidArgument("snapper: radius must be positive");
}

AtomSnapper AtomSnapper::spikes_and_zero(std::size_t n, std::size_t k, double radius) {
  const BayesOracleDenoiser enumerator(n, k);
  std::vector<SymMatrix> atoms;
  for (std::size_t a = 0; a < enumerator.atom_count(); ++a) {
    const SparseSpike u = enumerator.atom(a);
    if (u.signs().front() < 0) continue;  // −u gives the same matrix
    atoms.push_back(u.matrix());
  }
  atoms.push_back(SymMatrix::zero(n));
  return AtomSnapper(std::move(atoms), radius);
}

std::size_t AtomSnapper::snap(const Matrix& m) const {
  std::size_t best = other_index();
  double best_d = radius_ * radius_;
  for (std::size_t a = 0; a < atoms_.size(); ++a) {
    if (atoms_[a].dim() != static_cast<std::size_t>(m.rows()) || m.rows() != m.cols()) {
      throw InvalidArgument("snapper: sample shape does not match the atoms");
    }
    const double d = frobenius_squared(Matrix(m - atoms_[a].matrix()));
    if (d <= best_d) {
      best_d = d;
      best = a;
    }
  }
  return best;
}

std::vector<double> snapped_posterior(const BayesOracleDenoiser& oracle,
                                      const Matrix& y, const AtomSnapper& snapper) {
  const std::vector<double> w = oracle.posterior_weights(y);
  std::vector<CompensatedSum> acc(snapper.categories());
  for (std::size_t a = 0; a < w.size(); ++a) {
    acc[snapper.snap(oracle.atom(a).matrix().matrix())].add(w[a]);
  }
  std::vector<double> out;
  for (const auto& c : acc) out.push_back(c.value());
  return out;
}

std::vector<double> snapped_frequencies(std::span<const Matrix> samples,
                                        const AtomSnapper& snapper) {
  if (samples.empty()) throw InvalidArgument("snapper: no samples");
  std::vector<double> counts(snapper.categories(), 0.0);
  for (const auto& m : samples) counts[snapper.snap(m)] += 1.0;
  for (double& c : counts) c /= static_cast<double>(samples.size());
  return counts;
}

double tv_discrete(std::span<const double> p_a, std::span<const double> p_b) {
  if (p_a.size() != p_b.size()) throw InvalidArgument("tv: supports differ in size");
  CompensatedSum acc;
  for (std::size_t i = 0; i < p_a.size(); ++i) acc.add(std::abs(p_a[i] - p_b[i]));
  return 0.5 * acc.value();
}

}  // namespace spikediff
