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

#include "spikediff/denoisers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "spikediff/error.hpp"

namespace spikediff {
namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

void require_shape(const Matrix& y, std::size_t n) {
  if (y.rows() != idx(n) || y.cols() != idx(n)) {
    std::ostringstream msg;
    msg << "observation is " << y.rows() << "x" << y.cols() << ", expected "
        << n << "x" << n;
    throw InvalidArgument(msg.str());
  }
}

void require_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw InvalidArgument("denoiser time must be finite and >= 0");
  }
}

SymMatrix from_selection(const Selection& sel, std::size_t n, double scale) {
  if (!sel.accepted) return SymMatrix::zero(n);
  Vector w = Vector::Zero(idx(n));
  for (std::size_t a = 0; a < sel.support.size(); ++a) {
    w(idx(sel.support[a])) = sel.signs[a];
  }
  return SymMatrix::outer(w, 1.0 / scale);
}

double binomial(std::size_t n, std::size_t k) {
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return std::round(c);
}

}  // namespace

Alg1Params Alg1Params::defaults(std::size_t n, std::size_t k) {
  if (k == 0 || k > n) throw InvalidArgument("alg1: need 1 <= k <= n");
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  const double eps = 2.0 * std::sqrt(kd * std::log(nd / kd) / nd);
  return {std::clamp(eps, 0.05, 0.9), n, k};
}

Alg2Params Alg2Params::defaults(std::size_t n, std::size_t k) {
  if (k == 0 || k > n) throw InvalidArgument("alg2: need 1 <= k <= n");
  const double ratio = static_cast<double>(n) / static_cast<double>(k * k);
  if (!(ratio > 1.0)) {
    throw InvalidArgument("alg2: default threshold needs k^2 < n; set s explicitly");
  }
  Alg2Params p;
  p.s = std::sqrt(1.05 * std::log(ratio));
  p.split_eps = 0.05;
  p.n = n;
  p.k = k;
  return p;
}

SymMatrix NullDenoiser::evaluate(const Matrix& y, double t) {
  require_shape(y, n_);
  require_time(t);
  return SymMatrix::zero(n_);
}

std::vector<std::size_t> top_k_by_magnitude(const Vector& v, std::size_t k) {
  std::vector<std::size_t> order(static_cast<std::size_t>(v.size()));
  std::iota(order.begin(), order.end(), 0);
  k = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k),
                    order.end(), [&](std::size_t a, std::size_t b) {
                      const double ma = std::abs(v(idx(a)));
                      const double mb = std::abs(v(idx(b)));
                      if (ma != mb) return ma > mb;
                      return a < b;
                    });
  order.resize(k);
  return order;
}

// --- spectral (alg1 / power) ---------------------------------------------

SpectralDenoiser::SpectralDenoiser(Alg1Params params)
    : params_(params), t_alg_(t_alg(params.n, params.k)) {
  if (!(params_.epsilon > 0.0 && params_.epsilon < 1.0)) {
    throw InvalidArgument("alg1: epsilon must lie in (0, 1)");
  }
}

SpectralDenoiser::SpectralDenoiser(Alg1Params params, std::size_t power_iters,
                                   NoiseStream stream)
    : SpectralDenoiser(params) {
  if (power_iters < 1) throw InvalidArgument("power: iters must be >= 1");
  power_iters_ = power_iters;
  stream_ = std::move(stream);
}

std::string SpectralDenoiser::id() const {
  if (power_iters_) return "power" + std::to_string(*power_iters_);
  return "alg1";
}

Selection SpectralDenoiser::select(const Matrix& y, double t) {
  require_shape(y, params_.n);
  require_time(t);
  Selection sel;
  if (t < t_alg_) return sel;
  const SymMatrix a = symmetrize(y, 2.0 * std::sqrt(t));

  Vector v;
  if (power_iters_) {
    NoiseStream call = stream_->split(calls_++);
    PowerResult pr = power_iteration(a, *power_iters_, call);
    sel.top_eigenvalue = pr.value;
    v = std::move(pr.vector);
  } else {
    auto pairs = top_eigenpairs(a, 1);
    sel.top_eigenvalue = pairs[0].value;
    v = std::move(pairs[0].vector);
  }
  const double n = static_cast<double>(params_.n);
  if (t >= n * n && sel.top_eigenvalue <= std::sqrt(t) / 2.0) return sel;

  const double threshold =
      params_.epsilon / std::sqrt(static_cast<double>(params_.k));
  for (std::size_t i = 0; i < params_.n; ++i) {
    if (std::abs(v(idx(i))) >= threshold) {
      sel.support.push_back(i);
      sel.signs.push_back(v(idx(i)) < 0.0 ? -1 : 1);
    }
  }
  sel.accepted = 2 * sel.support.size() >= params_.k;
  return sel;
}

SymMatrix SpectralDenoiser::evaluate(const Matrix& y, double t) {
  const Selection sel = select(y, t);
  return from_selection(sel, params_.n, static_cast<double>(sel.support.size()));
}

// --- alg2 -----------------------------------------------------------------

SplitSpectralDenoiser::SplitSpectralDenoiser(Alg2Params params,
                                             SplitNoiseMode mode,
                                             NoiseStream stream)
    : params_(params),
      mode_(mode),
      stream_(std::move(stream)),
      gate_time_(std::max(t_alg(params.n, params.k), 1.0)),
      path_(Matrix::Zero(idx(params.n), idx(params.n))) {
  if (!(params_.s > 0.0)) throw InvalidArgument("alg2: s must be positive");
  if (!(params_.split_eps > 0.0 && params_.split_eps < 1.0)) {
    throw InvalidArgument("alg2: split_eps must lie in (0, 1)");
  }
}

Matrix SplitSpectralDenoiser::noise_at(double t) {
  const std::size_t n = params_.n;
  if (mode_ == SplitNoiseMode::kFresh) {
    NoiseStream draw = stream_.split(draws_++);
    return std::sqrt(t) * gaussian_matrix(n, draw);
  }
  if (t < path_time_) {
    throw InvalidArgument("alg2: path-mode noise queried at a decreasing time");
  }
  if (t > path_time_) {
    NoiseStream draw = stream_.split(draws_++);
    path_ += std::sqrt(t - path_time_) * gaussian_matrix(n, draw);
    path_time_ = t;
  }
  return path_;
}

Selection SplitSpectralDenoiser::select(const Matrix& y, double t) {
  require_shape(y, params_.n);
  require_time(t);
  Selection sel;
  // Below the time gate the output is 0 whatever the eigenvalue test says,
  // so the noise draw and eigensolve are skipped.
  if (t < gate_time_) return sel;

  const Matrix g = noise_at(t);
  const double root_eps = std::sqrt(params_.split_eps);
  const double scale = 2.0 * std::sqrt(t);
  const SymMatrix a_plus = symmetrize(y + root_eps * g, scale);
  const SymMatrix a_minus = symmetrize(y - g / root_eps, scale);

  const auto top = top_eigenpairs(soft_threshold(a_plus, params_.s), 1);
  sel.top_eigenvalue = top[0].value;
  const double k = static_cast<double>(params_.k);
  if (!(sel.top_eigenvalue > k + std::sqrt(t) / params_.s)) return sel;

  const Vector refined = a_minus.matrix() * top[0].vector;
  sel.support = top_k_by_magnitude(refined, params_.k);
  std::sort(sel.support.begin(), sel.support.end());
  for (std::size_t i : sel.support) {
    sel.signs.push_back(params_.signed_output && refined(idx(i)) < 0.0 ? -1 : 1);
  }
  sel.accepted = true;
  return sel;
}

SymMatrix SplitSpectralDenoiser::evaluate(const Matrix& y, double t) {
  return from_selection(select(y, t), params_.n, static_cast<double>(params_.k));
}

// --- Bayes oracle -----------------------------------------------------------

double enumeration_size(std::size_t n, std::size_t k) {
  return binomial(n, k) * std::ldexp(1.0, static_cast<int>(k));
}

BayesOracleDenoiser::BayesOracleDenoiser(std::size_t n, std::size_t k, double cap)
    : n_(n), k_(k), sign_patterns_(std::size_t{1} << k) {
  if (k == 0 || k > n) throw InvalidArgument("bayes: need 1 <= k <= n");
  const double required = enumeration_size(n, k);
  if (k >= 63 || required > cap) {
    std::ostringstream msg;
    msg << "bayes oracle needs " << required << " atoms (C(" << n << "," << k
        << ")*2^" << k << "), above the enumeration cap " << cap;
    throw CapacityError(msg.str(), required);
  }
  std::vector<std::size_t> comb(k);
  std::iota(comb.begin(), comb.end(), 0);
  while (true) {
    supports_.push_back(comb);
    std::size_t i = k;
    while (i > 0 && comb[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++comb[i - 1];
    for (std::size_t j = i; j < k; ++j) comb[j] = comb[j - 1] + 1;
  }
}

SparseSpike BayesOracleDenoiser::atom(std::size_t a) const {
  const std::size_t s = a / sign_patterns_;
  const std::size_t pattern = a % sign_patterns_;
  std::vector<int> signs(k_);
  for (std::size_t b = 0; b < k_; ++b) signs[b] = (pattern >> b) & 1u ? -1 : 1;
  return SparseSpike(n_, supports_.at(s), std::move(signs));
}

std::vector<double> BayesOracleDenoiser::posterior_weights(const Matrix& y) const {
  require_shape(y, n_);
  const Matrix a = 0.5 * (y + y.transpose());
  const double inv_k = 1.0 / static_cast<double>(k_);
  std::vector<double> logw;
  logw.reserve(atom_count());
  std::vector<double> sub(k_ * k_);
  for (const auto& sup : supports_) {
    for (std::size_t p = 0; p < k_; ++p) {
      for (std::size_t q = 0; q < k_; ++q) sub[p * k_ + q] = a(idx(sup[p]), idx(sup[q]));
    }
    double diag = 0.0;
    for (std::size_t p = 0; p < k_; ++p) diag += sub[p * k_ + p];
    for (std::size_t pattern = 0; pattern < sign_patterns_; ++pattern) {
      double off = 0.0;
      for (std::size_t p = 0; p < k_; ++p) {
        const double sp = (pattern >> p) & 1u ? -1.0 : 1.0;
        for (std::size_t q = p + 1; q < k_; ++q) {
          const double sq = (pattern >> q) & 1u ? -1.0 : 1.0;
          off += sp * sq * sub[p * k_ + q];
        }
      }
      logw.push_back((diag + 2.0 * off) * inv_k);
    }
  }
  const double mx = *std::max_element(logw.begin(), logw.end());
  double total = 0.0;
  for (double& w : logw) {
    w = std::exp(w - mx);
    total += w;
  }
  for (double& w : logw) w /= total;
  return logw;
}

SymMatrix BayesOracleDenoiser::evaluate(const Matrix& y, double t) {
  require_time(t);
  const std::vector<double> w = posterior_weights(y);
  Matrix acc = Matrix::Zero(idx(n_), idx(n_));
  const double inv_k = 1.0 / static_cast<double>(k_);
  double sum = 0.0;
  std::size_t a = 0;
  for (const auto& sup : supports_) {
    for (std::size_t pattern = 0; pattern < sign_patterns_; ++pattern, ++a) {
      const double wa = w[a];
      sum += wa;
      if (wa == 0.0) continue;
      for (std::size_t p = 0; p < k_; ++p) {
        const double sp = (pattern >> p) & 1u ? -1.0 : 1.0;
        for (std::size_t q = 0; q < k_; ++q) {
          const double sq = (pattern >> q) & 1u ? -1.0 : 1.0;
          acc(idx(sup[p]), idx(sup[q])) += wa * (sp * sq * inv_k);
        }
      }
    }
  }
  last_weight_error_ = sum - 1.0;
  return SymMatrix::from_symmetric(std::move(acc));
}

// --- cheat drift ------------------------------------------------------------

namespace {

SparseSpike cheat_spike(const Matrix& z1, std::size_t k) {
  const auto n = static_cast<std::size_t>(z1.rows());
  if (z1.cols() != z1.rows() || n == 0) {
    throw InvalidArgument("cheat: first noise draw must be a non-empty square matrix");
  }
  if (k == 0 || k > n) throw InvalidArgument("cheat: need 1 <= k <= n");
  std::vector<std::size_t> support(k);
  std::vector<int> signs(k);
  const Eigen::Index sign_row = n >= 2 ? 1 : 0;
  for (std::size_t j = 0; j < k; ++j) {
    const double zj = z1(0, idx(j));
    std::size_t rank = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double zi = z1(0, idx(i));
      if (zi < zj || (zi == zj && i < j)) ++rank;
    }
    support[j] = rank;
    signs[j] = z1(sign_row, idx(j)) < 0.0 ? -1 : 1;
  }
  return SparseSpike(n, std::move(support), std::move(signs));
}

}  // namespace

CheatDenoiser::CheatDenoiser(const Matrix& z1, std::size_t k)
    : spike_(cheat_spike(z1, k)), x_(spike_.matrix()) {}

SymMatrix CheatDenoiser::evaluate(const Matrix& y, double t) {
  require_shape(y, spike_.n());
  require_time(t);
  return x_;
}

// --- φ tests and composite --------------------------------------------------

double phi1_statistic(const Matrix& y, std::size_t k) {
  const SymMatrix a = symmetrize(y, 2.0);
  const auto top = top_eigenpairs(a, 1);
  const Vector& v = top[0].vector;
  const auto chosen = top_k_by_magnitude(v, k);
  Vector vhat = Vector::Zero(v.size());
  const double mag = 1.0 / std::sqrt(static_cast<double>(k));
  for (std::size_t i : chosen) vhat(idx(i)) = sign_of(v(idx(i))) * mag;
  return vhat.dot(a.matrix() * vhat);
}

bool phi1_test(const Matrix& y, double t, std::size_t k, double beta) {
  if (!(t > 0.0)) throw InvalidArgument("phi1: t must be positive");
  return phi1_statistic(y, k) >= beta * t;
}

bool phi2_test(const Matrix& y, double t) {
  if (!(t > 0.0)) throw InvalidArgument("phi2: t must be positive");
  const auto top = top_eigenpairs(symmetrize(y, 2.0), 1);
  return top[0].value >= t / 2.0;
}

SymMatrix project_unit_ball(const SymMatrix& m) {
  const double norm = std::sqrt(frobenius_squared(m));
  if (norm <= 1.0 + 1e-9) return m;
  return m.scaled(1.0 / norm);
}

CompositeDenoiser::CompositeDenoiser(std::unique_ptr<Denoiser> base,
                                     std::size_t k, CompositeParams params)
    : base_(std::move(base)), k_(k), params_(params) {
  if (!base_) throw InvalidArgument("composite: base denoiser is required");
  auto in_unit = [](double x) { return x > 0.0 && x < 1.0; };
  if (!in_unit(params_.gamma) || !in_unit(params_.delta) ||
      !in_unit(params_.beta) || !in_unit(params_.eps_clip)) {
    throw InvalidArgument("composite: gamma, delta, beta, eps_clip must lie in (0, 1)");
  }
  t_alg_ = t_alg(base_->dim(), k_);
}

SymMatrix CompositeDenoiser::evaluate(const Matrix& y, double t) {
  SymMatrix m0 = project_unit_ball(base_->evaluate(y, t));
  const std::size_t n = base_->dim();
  if (t <= (1.0 - params_.gamma) * t_alg_) {
    if (std::sqrt(frobenius_squared(m0)) <= 1.0 - params_.eps_clip) return m0;
    return SymMatrix::zero(n);
  }
  if (t < (1.0 + params_.delta) * t_alg_) return m0;
  if (m0.is_zero()) return m0;
  const double nd = static_cast<double>(n);
  const bool keep = t < nd * nd * nd * nd ? phi1_test(y, t, k_, params_.beta)
                                          : phi2_test(y, t);
  return keep ? m0 : SymMatrix::zero(n);
}

}  // namespace spikediff
