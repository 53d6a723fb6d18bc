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
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "spikediff/denoisers.hpp"
#include "spikediff/linalg.hpp"
#include "spikediff/noise_stream.hpp"

namespace spikediff {

// Builds a fresh denoiser for one trial. The stream argument keys any
// internal randomness the denoiser needs.
using DenoiserFactory = std::function<std::unique_ptr<Denoiser>(NoiseStream)>;

struct DiffusionConfig {
  std::size_t n = 0;
  double delta = 0.0;
  // Horizon. Rounded up so that (t_max − t_start) is a whole number of steps.
  double t_max = 0.0;
  double t_start = 0.0;
  // Warm start ŷ_{t_start}; zero when absent.
  std::optional<Matrix> y_start;
  // Noise index of the first step. A run resumed from step ℓ of another run
  // with the same stream and step_offset = ℓ reproduces its noise.
  std::size_t step_offset = 0;
  // Step indices ℓ whose state ŷ_{t_start + ℓΔ} is kept. Out-of-range
  // indices are ignored; the final step is always kept.
  std::vector<std::size_t> record_steps;
  bool log_drift = false;
};

struct DiffusionRun {
  std::size_t steps = 0;
  double t_end = 0.0;              // t_start + steps·Δ
  std::vector<double> times;       // aligned with states
  std::vector<Matrix> states;
  SymMatrix final_sample;          // m̂(ŷ_T, T)
  std::vector<double> drift_log;   // ‖m̂(ŷ_{ℓΔ}, ℓΔ)‖_F per step when requested
};

std::size_t step_count(const DiffusionConfig& config);

// `points` log-spaced step indices in [1, steps] (deduplicated), plus steps.
std::vector<std::size_t> log_spaced_steps(std::size_t steps, std::size_t points);

// The n×n noise matrix used at step ℓ of a run keyed by `stream`.
Matrix step_noise(std::size_t n, std::size_t step, const NoiseStream& stream);

// ẑ at step 0: the matrix the cheat drift is built from.
inline Matrix first_noise_draw(std::size_t n, const NoiseStream& stream) {
  return step_noise(n, 0, stream);
}

// Euler scheme ŷ_{t+Δ} = ŷ_t + Δ·m̂(ŷ_t, t) + √Δ·ẑ_t with full n×n i.i.d.
// ẑ. Throws NumericalError when the drift leaves the finite range.
DiffusionRun euler_sample(Denoiser& denoiser, const DiffusionConfig& config,
                          const NoiseStream& stream);

// The ideal process y_t = t·x + W_t at the recorded step times, for side by
// side comparison with euler_sample. final_sample holds (y_T + y_Tᵀ)/(2T).
DiffusionRun exact_sampler_demo(const SymMatrix& x, const DiffusionConfig& config,
                                const NoiseStream& stream);

struct ReductionConfig {
  double sigma = 0.0;
  double theta = 0.0;      // T = θ·n²
  double delta = 0.0;
  std::size_t repeats = 1;
};

// Samples x̂ ≈ P(x | y) for y = x + σ·g: warm-start ŷ_{1/σ²} = y/σ², run the
// Euler scheme to T = θ·n², return ŷ_T / T.
Matrix reduction_sample(const Matrix& y, Denoiser& denoiser,
                        const ReductionConfig& rconfig, const NoiseStream& stream);

// Average of rconfig.repeats independent reduction samples. Repeat r uses
// stream.split(r) and a denoiser from factory(stream.split(r).split("den")).
Matrix posterior_mean_estimate(const Matrix& y, const DenoiserFactory& factory,
                               const ReductionConfig& rconfig,
                               const NoiseStream& stream, std::size_t threads = 1);

// All repeats of posterior_mean_estimate, in repeat order.
std::vector<Matrix> reduction_samples(const Matrix& y, const DenoiserFactory& factory,
                                      const ReductionConfig& rconfig,
                                      const NoiseStream& stream, std::size_t threads = 1);

}  // namespace spikediff
