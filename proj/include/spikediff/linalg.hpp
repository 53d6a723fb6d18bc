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

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

#include "spikediff/noise_stream.hpp"

namespace spikediff {

// General dense square matrix; observations y_t live here unsymmetrized.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Dense real symmetric matrix. Every construction path produces an exactly
// symmetric, finite result; there is no mutable element access.
class SymMatrix {
 public:
  SymMatrix() = default;

  static SymMatrix zero(std::size_t n);
  static SymMatrix identity(std::size_t n);
  // Throws InvalidArgument unless `m` is square, finite and exactly symmetric.
  static SymMatrix from_symmetric(Matrix m);
  // v vᵀ scaled by `scale`, built so that entry (i,j) and (j,i) are the same
  // floating-point product.
  static SymMatrix outer(const Vector& v, double scale = 1.0);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const Matrix& matrix() const noexcept { return m_; }

  bool is_zero() const;

  SymMatrix scaled(double a) const;
  friend SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);
  friend SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);
  friend bool operator==(const SymMatrix& a, const SymMatrix& b) {
    return a.m_ == b.m_;
  }

 private:
  explicit SymMatrix(Matrix m) : m_(std::move(m)) {}
  friend SymMatrix symmetrize(const Matrix& y, double scale);
  friend SymMatrix soft_threshold(const SymMatrix& a, double s);
  friend SymMatrix sample_goe(std::size_t n, NoiseStream& stream);

  Matrix m_;
};

struct EigenPair {
  double value = 0.0;
  Vector vector;
};

struct PowerResult {
  double value = 0.0;
  Vector vector;
  bool degenerate = false;  // A·v vanished; vector is the normalized start
};

struct Norms {
  double frobenius = 0.0;
  double op = 0.0;
};

// Tolerances used by the eigensolver. The residual test is relative to
// max(1, |λ|) so that it is scale-aware for A_t-sized inputs.
inline constexpr double kEigenResidualTol = 1e-10;
inline constexpr std::size_t kDenseEigenMaxDim = 512;

// GOE(n): off-diagonal N(0, 1), diagonal N(0, 2). Consumes n² normals from
// `stream` in row-major order (upper triangle used).
SymMatrix sample_goe(std::size_t n, NoiseStream& stream);

// √dt · GOE(n); summing independent increments gives the GOE process.
SymMatrix goe_process_increment(std::size_t n, double dt, NoiseStream& stream);

// n×n matrix of i.i.d. N(0, 1), filled row-major.
Matrix gaussian_matrix(std::size_t n, NoiseStream& stream);
Vector gaussian_vector(std::size_t n, NoiseStream& stream);

// (Y + Yᵀ) / scale.
SymMatrix symmetrize(const Matrix& y, double scale);

// Top `r` eigenpairs, eigenvalues descending. Dense LAPACK (dsyevr) up to
// kDenseEigenMaxDim, Lanczos with full reorthogonalization above. Each
// eigenvector has its largest-magnitude coordinate made positive (lowest
// index on ties).
std::vector<EigenPair> top_eigenpairs(const SymMatrix& a, std::size_t r);

// All eigenvalues, descending.
std::vector<double> eigenvalues(const SymMatrix& a);

// `iters` multiply-normalize steps from a Gaussian start drawn from `stream`;
// the returned value is the Rayleigh quotient.
PowerResult power_iteration(const SymMatrix& a, std::size_t iters,
                            NoiseStream& stream);

// Entrywise η_s(x) = (|x| − s)₊ sign(x).
double soft_threshold(double x, double s);
SymMatrix soft_threshold(const SymMatrix& a, double s);

Norms norms(const SymMatrix& a);

// Σ entries² with compensated summation (row-major order).
double frobenius_squared(const Matrix& m);
double frobenius_squared(const SymMatrix& m);

// sign(0) := +1.
inline double sign_of(double x) { return x < 0.0 ? -1.0 : 1.0; }

// Applies the eigenvector sign convention in place.
void canonicalize_sign(Vector& v);

}  // namespace spikediff
