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

#include "spikediff/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spikediff/error.hpp"
#include "spikediff/parallel.hpp"
#include "spikediff/spike_model.hpp"
#include "spikediff/stats.hpp"

namespace spikediff {

std::size_t step_count(const DiffusionConfig& config) {
  if (config.n == 0) throw InvalidArgument("diffusion: n must be positive");
  if (!(config.delta > 0.0) || !std::isfinite(config.delta)) {
    throw InvalidArgument("diffusion: delta must be positive");
  }
  if (!(config.t_start >= 0.0) || !(config.t_max >= config.t_start) ||
      !std::isfinite(config.t_max)) {
    throw InvalidArgument("diffusion: need 0 <= t_start <= t_max");
  }
  const double span = (config.t_max - config.t_start) / config.delta;
  // Absorb representation error so that e.g. 1400 / 3.5 is 400 steps.
  const double steps = std::ceil(span - 1e-9 * std::max(1.0, span));
  return static_cast<std::size_t>(std::max(steps, 0.0));
}

std::vector<std::size_t> log_spaced_steps(std::size_t steps, std::size_t points) {
  std::vector<std::size_t> out;
  if (steps == 0) return out;
  const double top = std::log(static_cast<double>(steps));
  for (std::size_t i = 0; i < points; ++i) {
    const double frac = points == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(points - 1);
    out.push_back(static_cast<std::size_t>(std::llround(std::exp(frac * top))));
  }
  out.push_back(steps);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Matrix step_noise(std::size_t n, std::size_t step, const NoiseStream& stream) {
  NoiseStream z = stream.split("z").split(step);
  return gaussian_matrix(n, z);
}

DiffusionRun euler_sample(Denoiser& denoiser, const DiffusionConfig& config,
                          const NoiseStream& stream) {
  const std::size_t steps = step_count(config);
  const auto n = static_cast<Eigen::Index>(config.n);
  if (denoiser.dim() != config.n) {
    throw InvalidArgument("diffusion: denoiser dimension does not match config.n");
  }
  Matrix y = config.y_start ? *config.y_start : Matrix::Zero(n, n);
  if (y.rows() != n || y.cols() != n) {
    throw InvalidArgument("diffusion: warm start has the wrong shape");
  }
  std::vector<std::size_t> record = config.record_steps;
  record.push_back(steps);
  std::sort(record.begin(), record.end());
  record.erase(std::unique(record.begin(), record.end()), record.end());

  DiffusionRun run;
  run.steps = steps;
  run.t_end = config.t_start + static_cast<double>(steps) * config.delta;
  const double root_delta = std::sqrt(config.delta);
  auto next_record = record.begin();
  auto keep = [&](std::size_t step, double t) {
    if (next_record != record.end() && *next_record == step) {
      run.times.push_back(t);
      run.states.push_back(y);
      ++next_record;
    }
  };
  keep(0, config.t_start);
  for (std::size_t step = 0; step < steps; ++step) {
    const double t = config.t_start + static_cast<double>(step) * config.delta;
    const SymMatrix drift = denoiser.evaluate(y, t);
    const double norm = std::sqrt(frobenius_squared(drift));
    if (!std::isfinite(norm)) {
      std::ostringstream msg;
      msg << "diffusion: non-finite drift at t=" << t << " (norm " << norm << ")";
      throw NumericalError(msg.str());
    }
    if (config.log_drift) run.drift_log.push_back(norm);
    y += config.delta * drift.matrix() +
         root_delta * step_noise(config.n, config.step_offset + step, stream);
    keep(step + 1, config.t_start + static_cast<double>(step + 1) * config.delta);
  }
  run.final_sample = denoiser.evaluate(y, run.t_end);
  return run;
}

DiffusionRun exact_sampler_demo(const SymMatrix& x, const DiffusionConfig& config,
                                const NoiseStream& stream) {
  const std::size_t steps = step_count(config);
  if (x.dim() != config.n) throw InvalidArgument("exact sampler: x has the wrong size");
  std::vector<std::size_t> record = config.record_steps;
  record.push_back(steps);
  std::sort(record.begin(), record.end());
  record.erase(std::unique(record.begin(), record.end()), record.end());
  record.erase(std::remove_if(record.begin(), record.end(),
                              [&](std::size_t s) { return s > steps; }),
               record.end());

  DiffusionRun run;
  run.steps = steps;
  run.t_end = config.t_start + static_cast<double>(steps) * config.delta;
  for (std::size_t s : record) {
    run.times.push_back(config.t_start + static_cast<double>(s) * config.delta);
  }
  NoiseStream path_stream = stream.split("exact");
  for (auto& obs : observe_path(x, run.times, path_stream)) {
    run.states.push_back(std::move(obs.y));
  }
  run.final_sample = run.t_end > 0.0 ? symmetrize(run.states.back(), 2.0 * run.t_end)
                                     : SymMatrix::zero(config.n);
  return run;
}

namespace {

DiffusionConfig reduction_config(const Matrix& y, const ReductionConfig& rc) {
  if (!(rc.sigma > 0.0)) throw ConfigError("reduction: sigma must be positive");
  if (!(rc.theta > 0.0)) throw ConfigError("reduction: theta must be positive");
  if (y.rows() != y.cols() || y.rows() == 0) {
    throw InvalidArgument("reduction: y must be a non-empty square matrix");
  }
  const double t0 = 1.0 / (rc.sigma * rc.sigma);
  const double n = static_cast<double>(y.rows());
  const double horizon = rc.theta * n * n;
  if (t0 > horizon) {
    std::ostringstream msg;
    msg << "reduction: t0 = 1/sigma^2 = " << t0 << " exceeds T = theta*n^2 = " << horizon;
    throw ConfigError(msg.str());
  }
  DiffusionConfig dc;
  dc.n = static_cast<std::size_t>(y.rows());
  dc.delta = rc.delta;
  dc.t_start = t0;
  dc.t_max = horizon;
  dc.y_start = y * t0;
  return dc;
}

}  // namespace

Matrix reduction_sample(const Matrix& y, Denoiser& denoiser,
                        const ReductionConfig& rconfig, const NoiseStream& stream) {
  const DiffusionConfig dc = reduction_config(y, rconfig);
  const DiffusionRun run = euler_sample(denoiser, dc, stream);
  return run.states.back() / run.t_end;
}

std::vector<Matrix> reduction_samples(const Matrix& y, const DenoiserFactory& factory,
                                      const ReductionConfig& rconfig,
                                      const NoiseStream& stream, std::size_t threads) {
  if (rconfig.repeats < 1) throw ConfigError("reduction: repeats must be >= 1");
  reduction_config(y, rconfig);
  std::vector<Matrix> out(rconfig.repeats);
  parallel_for(rconfig.repeats, threads, [&](std::size_t r) {
    const NoiseStream rs = stream.split(r);
    auto den = factory(rs.split("den"));
    out[r] = reduction_sample(y, *den, rconfig, rs);
  });
  return out;
}

Matrix posterior_mean_estimate(const Matrix& y, const DenoiserFactory& factory,
                               const ReductionConfig& rconfig,
                               const NoiseStream& stream, std::size_t threads) {
  const std::vector<Matrix> samples = reduction_samples(y, factory, rconfig, stream, threads);
  Matrix mean = Matrix::Zero(y.rows(), y.cols());
  std::vector<double> column(samples.size());
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    for (Eigen::Index j = 0; j < y.cols(); ++j) {
      for (std::size_t r = 0; r < samples.size(); ++r) column[r] = samples[r](i, j);
      mean(i, j) = compensated_sum(column) / static_cast<double>(samples.size());
    }
  }
  return mean;
}

}  // namespace spikediff
