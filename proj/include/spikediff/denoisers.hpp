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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spikediff/linalg.hpp"
#include "spikediff/noise_stream.hpp"
#include "spikediff/spike_model.hpp"

namespace spikediff {

// A (possibly randomized) map (y, t) -> estimate of x. Doubles as the drift
// of the generative diffusion. Instances carry private state (noise paths,
// call counters) and must not be shared across threads mid-trial.
class Denoiser {
 public:
  virtual ~Denoiser() = default;
  virtual std::string id() const = 0;
  virtual std::size_t dim() const = 0;
  // y is n×n and need not be symmetric; the result is symmetric.
  virtual SymMatrix evaluate(const Matrix& y, double t) = 0;
};

// Spectral support estimator with threshold ε / √k.
struct Alg1Params {
  double epsilon = 0.5;
  std::size_t n = 0;
  std::size_t k = 0;

  // ε = 2·sqrt(k log(n/k) / n), clamped to [0.05, 0.9].
  static Alg1Params defaults(std::size_t n, std::size_t k);
};

// Gaussian-split, soft-thresholded spectral estimator for k ≪ √n.
struct Alg2Params {
  double s = 1.0;
  double split_eps = 0.05;
  std::size_t n = 0;
  std::size_t k = 0;
  // true: w wᵀ / k with w_i = sign(v̂_i) on the selected set.
  // false: 1_S 1_Sᵀ / k.
  bool signed_output = true;

  // s = sqrt(1.05 · log(n/k²)), split_eps = 0.05. Requires k² < n.
  static Alg2Params defaults(std::size_t n, std::size_t k);
};

struct CompositeParams {
  double gamma = 0.1;
  double eps_clip = 0.1;
  double delta = 0.1;
  double beta = 0.5;
};

class NullDenoiser final : public Denoiser {
 public:
  explicit NullDenoiser(std::size_t n) : n_(n) {}
  std::string id() const override { return "null"; }
  std::size_t dim() const override { return n_; }
  SymMatrix evaluate(const Matrix& y, double t) override;

 private:
  std::size_t n_;
};

// Outcome of the support-selection stage shared by the spectral estimators.
struct Selection {
  bool accepted = false;  // false means the estimator returns 0
  std::vector<std::size_t> support;
  std::vector<int> signs;
  double top_eigenvalue = 0.0;
};

// Top-eigenvector estimator. With `power_iters` set, the eigenvector comes
// from that many power-method steps (random start from `stream`) instead of
// the exact solver.
class SpectralDenoiser final : public Denoiser {
 public:
  explicit SpectralDenoiser(Alg1Params params);
  SpectralDenoiser(Alg1Params params, std::size_t power_iters,
                   NoiseStream stream);

  std::string id() const override;
  std::size_t dim() const override { return params_.n; }
  SymMatrix evaluate(const Matrix& y, double t) override;
  Selection select(const Matrix& y, double t);

  const Alg1Params& params() const noexcept { return params_; }

 private:
  Alg1Params params_;
  double t_alg_;
  std::optional<std::size_t> power_iters_;
  std::optional<NoiseStream> stream_;
  std::uint64_t calls_ = 0;
};

enum class SplitNoiseMode {
  kFresh,  // new N(0, t·I) draw per call
  kPath,   // one Brownian path g_t, sampled at non-decreasing call times
};

class SplitSpectralDenoiser final : public Denoiser {
 public:
  SplitSpectralDenoiser(Alg2Params params, SplitNoiseMode mode,
                        NoiseStream stream);

  std::string id() const override { return "alg2"; }
  std::size_t dim() const override { return params_.n; }
  SymMatrix evaluate(const Matrix& y, double t) override;
  Selection select(const Matrix& y, double t);

  const Alg2Params& params() const noexcept { return params_; }

 private:
  Matrix noise_at(double t);

  Alg2Params params_;
  SplitNoiseMode mode_;
  NoiseStream stream_;
  double gate_time_;
  std::uint64_t draws_ = 0;
  double path_time_ = 0.0;
  Matrix path_;
};

inline constexpr double kDefaultEnumerationCap = 5e6;

// |B_{n,k}| = C(n,k)·2^k as a double (exact for all sizes we can enumerate).
double enumeration_size(std::size_t n, std::size_t k);

// Posterior mean E[x | y_t = y] under x = u uᵀ, u ~ Unif(B_{n,k}), by
// exhaustive enumeration with log-weights <y, u uᵀ>.
class BayesOracleDenoiser final : public Denoiser {
 public:
  BayesOracleDenoiser(std::size_t n, std::size_t k,
                      double cap = kDefaultEnumerationCap);

  std::string id() const override { return "bayes"; }
  std::size_t dim() const override { return n_; }
  SymMatrix evaluate(const Matrix& y, double t) override;

  std::size_t atom_count() const noexcept { return supports_.size() * sign_patterns_; }
  // Atom a = (support index, sign pattern) in enumeration order.
  SparseSpike atom(std::size_t a) const;
  // Normalized posterior weights over atoms for observation y.
  std::vector<double> posterior_weights(const Matrix& y) const;
  // Σ weights - 1 from the most recent evaluate().
  double last_weight_error() const noexcept { return last_weight_error_; }

 private:
  std::size_t n_;
  std::size_t k_;
  std::vector<std::vector<std::size_t>> supports_;
  std::size_t sign_patterns_;
  double last_weight_error_ = 0.0;
};

// Drift that ignores (y, t) and returns a fixed spike built from the
// diffusion's first noise matrix: the support is the set of ranks of the
// first k entries of row 0, and the signs are those of row 1 (row 0 when
// n = 1) over the same columns.
class CheatDenoiser final : public Denoiser {
 public:
  CheatDenoiser(const Matrix& z1, std::size_t k);

  std::string id() const override { return "cheat"; }
  std::size_t dim() const override { return spike_.n(); }
  SymMatrix evaluate(const Matrix& y, double t) override;
  const SparseSpike& spike() const noexcept { return spike_; }

 private:
  SparseSpike spike_;
  SymMatrix x_;
};

// Symmetrize, take the top eigenvector, keep its k largest magnitudes as a
// ±1/√k vector v̂ and test <v̂, A v̂> ≥ β·t.
bool phi1_test(const Matrix& y, double t, std::size_t k, double beta);
double phi1_statistic(const Matrix& y, std::size_t k);
// λ₁((y + yᵀ)/2) ≥ t/2.
bool phi2_test(const Matrix& y, double t);

// Gated wrapper around a base estimator m̂₀ (projected onto the unit
// Frobenius ball):
//   t ≤ (1−γ)t_alg              m̂₀ · 1{‖m̂₀‖ ≤ 1 − eps_clip}
//   (1−γ)t_alg < t < (1+δ)t_alg  m̂₀
//   (1+δ)t_alg ≤ t < n⁴          m̂₀ · φ₁
//   t ≥ n⁴                       m̂₀ · φ₂
class CompositeDenoiser final : public Denoiser {
 public:
  CompositeDenoiser(std::unique_ptr<Denoiser> base, std::size_t k,
                    CompositeParams params = {});

  std::string id() const override { return "composite(" + base_->id() + ")"; }
  std::size_t dim() const override { return base_->dim(); }
  SymMatrix evaluate(const Matrix& y, double t) override;

 private:
  std::unique_ptr<Denoiser> base_;
  std::size_t k_;
  CompositeParams params_;
  double t_alg_;
};

// Projects onto {‖m‖_F ≤ 1}; leaves m unchanged when ‖m‖_F ≤ 1 + 1e-9.
SymMatrix project_unit_ball(const SymMatrix& m);

// k indices of largest |v_i|, ties broken by lower index, returned in
// selection order.
std::vector<std::size_t> top_k_by_magnitude(const Vector& v, std::size_t k);

}  // namespace spikediff
