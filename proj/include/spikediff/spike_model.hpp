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
#include <optional>
#include <string_view>
#include <vector>

#include "spikediff/linalg.hpp"

namespace spikediff {

// A point of B_{n,k}: u_i = sign_i / √k on the support, 0 elsewhere.
class SparseSpike {
 public:
  // Throws InvalidArgument if the support is not k distinct in-range
  // indices or a sign is not ±1. The support is stored sorted, with signs
  // permuted alongside.
  SparseSpike(std::size_t n, std::vector<std::size_t> support,
              std::vector<int> signs);

  std::size_t n() const noexcept { return n_; }
  std::size_t k() const noexcept { return support_.size(); }
  const std::vector<std::size_t>& support() const noexcept { return support_; }
  const std::vector<int>& signs() const noexcept { return signs_; }

  Vector vector() const;
  // x = u uᵀ with entries sign_i·sign_j / k.
  SymMatrix matrix() const;

  friend bool operator==(const SparseSpike&, const SparseSpike&) = default;

 private:
  std::size_t n_;
  std::vector<std::size_t> support_;
  std::vector<int> signs_;
};

enum class TargetKind { kSpiked, kCenteredSpiked, kMixture };

TargetKind parse_target_kind(std::string_view name);
std::string_view to_string(TargetKind kind);

struct TargetDistribution {
  TargetKind kind = TargetKind::kSpiked;
  std::size_t n = 0;
  std::size_t k = 0;
};

struct TargetDraw {
  SymMatrix x;
  std::optional<SparseSpike> spike;  // absent for the δ₀ half of the mixture
  // ‖x‖²_F in closed form (1, 1 − 1/n or 0). The stored entries ±1/k are
  // rounded, so frobenius_squared(x) can be off by an ulp.
  double norm_squared = 0.0;
};

// ‖estimate − x‖²_F expanded as ‖m‖² − 2⟨m, x⟩ + ‖x‖² with the closed-form
// ‖x‖²; the zero estimate therefore scores exactly draw.norm_squared.
// Rounding can push a perfect estimate a few ulps below 0; those are
// reported as 0.
double squared_error(const SymMatrix& estimate, const TargetDraw& draw);

struct Observation {
  double t = 0.0;
  Matrix y;
  std::optional<SparseSpike> truth;
};

SparseSpike sample_spike(std::size_t n, std::size_t k, NoiseStream& stream);
SymMatrix spike_matrix(const SparseSpike& u);

// spiked: u uᵀ; centered: u uᵀ − I/n; mixture: 0 w.p. ½, else centered.
TargetDraw sample_target(const TargetDistribution& dist, NoiseStream& stream);

// y = t·x + √t·g with n² independent standard normals in g.
Observation observe_single(const SymMatrix& x, double t, NoiseStream& stream,
                           std::optional<SparseSpike> truth = std::nullopt);

// y_t = t·x + W_t along one Brownian path W sampled at the increasing grid.
std::vector<Observation> observe_path(const SymMatrix& x,
                                      const std::vector<double>& times,
                                      NoiseStream& stream);

// Algorithmic threshold: k² log(n/k²) when k < √n, n/2 otherwise.
double t_alg(std::size_t n, std::size_t k);
// Bayes threshold 2k log(n/k).
double t_bayes(std::size_t n, std::size_t k);

}  // namespace spikediff
