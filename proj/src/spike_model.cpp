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

#include "spikediff/spike_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "spikediff/error.hpp"
#include "spikediff/stats.hpp"

namespace spikediff {
namespace {

void require_nk(std::size_t n, std::size_t k) {
  if (k == 0 || k > n) {
    throw InvalidArgument("need 1 <= k <= n (got n=" + std::to_string(n) +
                          ", k=" + std::to_string(k) + ")");
  }
}

}  // namespace

SparseSpike::SparseSpike(std::size_t n, std::vector<std::size_t> support,
                         std::vector<int> signs)
    : n_(n) {
  if (support.size() != signs.size()) {
    throw InvalidArgument("spike support and signs differ in length");
  }
  require_nk(n, support.size());
  std::vector<std::size_t> order(support.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return support[a] < support[b]; });
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const std::size_t i = support[order[pos]];
    const int s = signs[order[pos]];
    if (i >= n) throw InvalidArgument("spike index out of range");
    if (!support_.empty() && support_.back() == i) {
      throw InvalidArgument("spike support has repeated index");
    }
    if (s != 1 && s != -1) throw InvalidArgument("spike sign must be +1 or -1");
    support_.push_back(i);
    signs_.push_back(s);
  }
}

Vector SparseSpike::vector() const {
  Vector u = Vector::Zero(static_cast<Eigen::Index>(n_));
  const double mag = 1.0 / std::sqrt(static_cast<double>(k()));
  for (std::size_t a = 0; a < k(); ++a) {
    u(static_cast<Eigen::Index>(support_[a])) = signs_[a] * mag;
  }
  return u;
}

SymMatrix SparseSpike::matrix() const {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(n_),
                          static_cast<Eigen::Index>(n_));
  const double inv_k = 1.0 / static_cast<double>(k());
  for (std::size_t a = 0; a < k(); ++a) {
    for (std::size_t b = 0; b < k(); ++b) {
      m(static_cast<Eigen::Index>(support_[a]),
        static_cast<Eigen::Index>(support_[b])) =
          (signs_[a] * signs_[b] > 0) ? inv_k : -inv_k;
    }
  }
  return SymMatrix::from_symmetric(std::move(m));
}

TargetKind parse_target_kind(std::string_view name) {
  if (name == "spiked") return TargetKind::kSpiked;
  if (name == "centered_spiked") return TargetKind::kCenteredSpiked;
  if (name == "mixture") return TargetKind::kMixture;
  throw ConfigError("unknown target distribution '" + std::string(name) + "'");
}

std::string_view to_string(TargetKind kind) {
  switch (kind) {
    case TargetKind::kSpiked:
      return "spiked";
    case TargetKind::kCenteredSpiked:
      return "centered_spiked";
    case TargetKind::kMixture:
      return "mixture";
  }
  return "spiked";
}

SparseSpike sample_spike(std::size_t n, std::size_t k, NoiseStream& stream) {
  require_nk(n, k);
  // Partial Fisher-Yates: the first k slots are a uniform k-subset.
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t span = n - i;
    const auto j = i + static_cast<std::size_t>(stream.uniform() * span);
    std::swap(perm[i], perm[std::min(j, n - 1)]);
  }
  std::vector<std::size_t> support(perm.begin(), perm.begin() + k);
  std::vector<int> signs(k);
  for (auto& s : signs) s = stream.uniform() < 0.5 ? 1 : -1;
  return SparseSpike(n, std::move(support), std::move(signs));
}

SymMatrix spike_matrix(const SparseSpike& u) { return u.matrix(); }

TargetDraw sample_target(const TargetDistribution& dist, NoiseStream& stream) {
  require_nk(dist.n, dist.k);
  if (dist.kind == TargetKind::kMixture && stream.uniform() < 0.5) {
    return {SymMatrix::zero(dist.n), std::nullopt, 0.0};
  }
  SparseSpike u = sample_spike(dist.n, dist.k, stream);
  SymMatrix x = u.matrix();
  double norm_squared = 1.0;
  if (dist.kind != TargetKind::kSpiked) {
    // E[u uᵀ] = I/n exactly.
    const double inv_n = 1.0 / static_cast<double>(dist.n);
    x = x - SymMatrix::identity(dist.n).scaled(inv_n);
    norm_squared = 1.0 - inv_n;
  }
  return {std::move(x), std::move(u), norm_squared};
}

double squared_error(const SymMatrix& estimate, const TargetDraw& draw) {
  if (estimate.dim() != draw.x.dim()) {
    throw InvalidArgument("squared_error: dimension mismatch");
  }
  if (estimate.is_zero()) return draw.norm_squared;
  const Matrix& m = estimate.matrix();
  const Matrix& x = draw.x.matrix();
  CompensatedSum acc;
  acc.add(draw.norm_squared);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      acc.add(m(i, j) * m(i, j));
      acc.add(-2.0 * m(i, j) * x(i, j));
    }
  }
  return std::max(acc.value(), 0.0);
}

Observation observe_single(const SymMatrix& x, double t, NoiseStream& stream,
                           std::optional<SparseSpike> truth) {
  if (!(t >= 0.0)) throw InvalidArgument("observation time must be >= 0");
  Observation obs;
  obs.t = t;
  obs.truth = std::move(truth);
  if (t == 0.0) {
    obs.y = Matrix::Zero(x.matrix().rows(), x.matrix().cols());
    return obs;
  }
  obs.y = t * x.matrix() + std::sqrt(t) * gaussian_matrix(x.dim(), stream);
  return obs;
}

std::vector<Observation> observe_path(const SymMatrix& x,
                                      const std::vector<double>& times,
                                      NoiseStream& stream) {
  if (!times.empty() && !(times.front() >= 0.0)) {
    throw InvalidArgument("observe_path: times must start at >= 0");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw InvalidArgument("observe_path: time grid must be strictly increasing");
    }
  }
  const std::size_t n = x.dim();
  std::vector<Observation> out;
  out.reserve(times.size());
  Matrix w = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  double prev = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double dt = times[i] - prev;
    if (dt > 0.0) {
      NoiseStream inc = stream.split(i);
      w += std::sqrt(dt) * gaussian_matrix(n, inc);
    }
    prev = times[i];
    out.push_back({times[i], times[i] * x.matrix() + w, std::nullopt});
  }
  return out;
}

double t_alg(std::size_t n, std::size_t k) {
  require_nk(n, k);
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  if (kd * kd < nd) return kd * kd * std::log(nd / (kd * kd));
  return nd / 2.0;
}

double t_bayes(std::size_t n, std::size_t k) {
  require_nk(n, k);
  const double kd = static_cast<double>(k);
  return 2.0 * kd * std::log(static_cast<double>(n) / kd);
}

}  // namespace spikediff
