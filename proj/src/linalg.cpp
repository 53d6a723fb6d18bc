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

#include "spikediff/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "spikediff/error.hpp"

namespace spikediff {
namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

void require_dim(std::size_t n) {
  if (n == 0) throw InvalidArgument("matrix dimension must be positive");
}

double residual_norm(const Matrix& a, const EigenPair& p) {
  return (a * p.vector - p.value * p.vector).norm();
}

void check_residual(const Matrix& a, const EigenPair& p) {
  const double res = residual_norm(a, p);
  if (!(res <= kEigenResidualTol * std::max(1.0, std::abs(p.value)))) {
    std::ostringstream msg;
    msg << "eigensolver residual " << res << " above tolerance for eigenvalue "
        << p.value;
    throw SolverFailure(msg.str(), res);
  }
}

std::vector<EigenPair> dense_top(const Matrix& a, std::size_t r) {
  const auto n = static_cast<lapack_int>(a.rows());
  Matrix work = a;  // dsyevr destroys its input
  Vector w(n);
  Matrix z(n, static_cast<Eigen::Index>(r));
  std::vector<lapack_int> isuppz(2 * r);
  lapack_int found = 0;
  const lapack_int il = n - static_cast<lapack_int>(r) + 1;
  const lapack_int info = LAPACKE_dsyevr(
      LAPACK_COL_MAJOR, 'V', 'I', 'U', n, work.data(), n, 0.0, 0.0, il, n,
      0.0, &found, w.data(), z.data(), n, isuppz.data());
  if (info != 0 || found != static_cast<lapack_int>(r)) {
    throw SolverFailure("dsyevr failed with info=" + std::to_string(info),
                        std::numeric_limits<double>::infinity());
  }
  std::vector<EigenPair> out;
  out.reserve(r);
  for (lapack_int j = static_cast<lapack_int>(r) - 1; j >= 0; --j) {
    EigenPair p{w(j), z.col(j)};
    canonicalize_sign(p.vector);
    out.push_back(std::move(p));
  }
  return out;
}

// Lanczos with full reorthogonalization. The start vector is fixed so the
// result is a pure function of the matrix.
std::vector<EigenPair> lanczos_top(const Matrix& a, std::size_t r) {
  const auto n = static_cast<std::size_t>(a.rows());
  NoiseStream start(0x1A2C205ull);
  Vector q = gaussian_vector(n, start);
  q.normalize();

  std::vector<Vector> basis;
  std::vector<double> alpha;
  std::vector<double> beta;
  double last_residual = std::numeric_limits<double>::infinity();
  const std::size_t max_dim = n;
  const std::size_t check_every = 8;

  while (basis.size() < max_dim) {
    basis.push_back(q);
    Vector w = a * q;
    const double al = q.dot(w);
    alpha.push_back(al);
    // Two passes of classical Gram-Schmidt against the whole basis.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) w -= b.dot(w) * b;
    }
    double be = w.norm();
    const std::size_t m = basis.size();
    const bool invariant = be <= 1e-13 * std::max(1.0, std::abs(al));

    if (m >= r && (m % check_every == 0 || invariant || m == max_dim)) {
      Matrix t = Matrix::Zero(idx(m), idx(m));
      for (std::size_t i = 0; i < m; ++i) {
        t(idx(i), idx(i)) = alpha[i];
        if (i + 1 < m) t(idx(i), idx(i + 1)) = t(idx(i + 1), idx(i)) = beta[i];
      }
      Eigen::SelfAdjointEigenSolver<Matrix> es(t);
      bool converged = true;
      std::vector<EigenPair> ritz;
      for (std::size_t j = 0; j < r; ++j) {
        const Eigen::Index col = idx(m - 1 - j);
        const double theta = es.eigenvalues()(col);
        const Vector s = es.eigenvectors().col(col);
        const double est = (invariant ? 0.0 : be) * std::abs(s(idx(m - 1)));
        if (est > 0.1 * kEigenResidualTol * std::max(1.0, std::abs(theta))) {
          converged = false;
          break;
        }
        Vector v = Vector::Zero(idx(n));
        for (std::size_t i = 0; i < m; ++i) v += s(idx(i)) * basis[i];
        v.normalize();
        ritz.push_back({theta, std::move(v)});
      }
      if (converged || m == max_dim) {
        last_residual = 0.0;
        for (auto& p : ritz) {
          last_residual = std::max(last_residual, residual_norm(a, p));
          canonicalize_sign(p.vector);
        }
        if (ritz.size() == r) return ritz;
      }
    }
    if (invariant) {
      // Krylov space exhausted; continue from a fresh orthogonal direction.
      w = gaussian_vector(n, start);
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& b : basis) w -= b.dot(w) * b;
      }
      be = 0.0;
      q = w.normalized();
    } else {
      q = w / be;
    }
    beta.push_back(be);
  }
  throw SolverFailure("Lanczos did not converge", last_residual);
}

}  // namespace

SymMatrix SymMatrix::zero(std::size_t n) {
  return SymMatrix(Matrix::Zero(idx(n), idx(n)));
}

SymMatrix SymMatrix::identity(std::size_t n) {
  return SymMatrix(Matrix::Identity(idx(n), idx(n)));
}

SymMatrix SymMatrix::from_symmetric(Matrix m) {
  if (m.rows() != m.cols()) throw InvalidArgument("matrix is not square");
  if (!m.allFinite()) throw InvalidArgument("matrix has non-finite entries");
  if (m != m.transpose()) throw InvalidArgument("matrix is not symmetric");
  return SymMatrix(std::move(m));
}

SymMatrix SymMatrix::outer(const Vector& v, double scale) {
  const Eigen::Index n = v.size();
  Matrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double e = (v(i) * v(j)) * scale;
      m(i, j) = e;
      m(j, i) = e;
    }
  }
  return SymMatrix(std::move(m));
}

bool SymMatrix::is_zero() const { return (m_.array() == 0.0).all(); }

SymMatrix SymMatrix::scaled(double a) const { return SymMatrix(m_ * a); }

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
  return SymMatrix(a.m_ + b.m_);
}

SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
  return SymMatrix(a.m_ - b.m_);
}

Matrix gaussian_matrix(std::size_t n, NoiseStream& stream) {
  // Row-major fill so the draw order is independent of the storage order.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> g(
      idx(n), idx(n));
  stream.fill_normal(std::span<double>(g.data(), n * n));
  return g;
}

Vector gaussian_vector(std::size_t n, NoiseStream& stream) {
  Vector v(idx(n));
  stream.fill_normal(std::span<double>(v.data(), n));
  return v;
}

SymMatrix sample_goe(std::size_t n, NoiseStream& stream) {
  require_dim(n);
  Matrix g = gaussian_matrix(n, stream);
  const double root2 = std::sqrt(2.0);
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    g(j, j) *= root2;
    for (Eigen::Index i = 0; i < j; ++i) g(j, i) = g(i, j);
  }
  return SymMatrix(std::move(g));
}

SymMatrix goe_process_increment(std::size_t n, double dt, NoiseStream& stream) {
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  return sample_goe(n, stream).scaled(std::sqrt(dt));
}

SymMatrix symmetrize(const Matrix& y, double scale) {
  if (y.rows() != y.cols()) throw InvalidArgument("symmetrize: non-square input");
  if (!(scale > 0.0)) throw InvalidArgument("symmetrize: scale must be positive");
  const Eigen::Index n = y.rows();
  Matrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double e = (y(i, j) + y(j, i)) / scale;
      m(i, j) = e;
      m(j, i) = e;
    }
  }
  return SymMatrix(std::move(m));
}

void canonicalize_sign(Vector& v) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > best_abs) {
      best_abs = std::abs(v(i));
      best = i;
    }
  }
  if (v.size() > 0 && v(best) < 0.0) v = -v;
}

std::vector<EigenPair> top_eigenpairs(const SymMatrix& a, std::size_t r) {
  const std::size_t n = a.dim();
  if (r < 1 || r > n) throw InvalidArgument("top_eigenpairs: need 1 <= r <= n");
  auto pairs = n <= kDenseEigenMaxDim ? dense_top(a.matrix(), r)
                                      : lanczos_top(a.matrix(), r);
  for (const auto& p : pairs) check_residual(a.matrix(), p);
  return pairs;
}

std::vector<double> eigenvalues(const SymMatrix& a) {
  const auto n = static_cast<lapack_int>(a.dim());
  if (n == 0) return {};
  Matrix work = a.matrix();
  std::vector<double> w(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'U', n,
                                         work.data(), n, w.data());
  if (info != 0) {
    throw SolverFailure("dsyevd failed with info=" + std::to_string(info),
                        std::numeric_limits<double>::infinity());
  }
  std::reverse(w.begin(), w.end());
  return w;
}

PowerResult power_iteration(const SymMatrix& a, std::size_t iters,
                            NoiseStream& stream) {
  if (iters < 1) throw InvalidArgument("power_iteration: iters must be >= 1");
  const std::size_t n = a.dim();
  require_dim(n);
  Vector v = gaussian_vector(n, stream);
  v.normalize();
  const Vector start = v;
  for (std::size_t it = 0; it < iters; ++it) {
    Vector w = a.matrix() * v;
    const double norm = w.norm();
    if (norm == 0.0) return {0.0, start, true};
    v = w / norm;
  }
  canonicalize_sign(v);
  return {v.dot(a.matrix() * v), v, false};
}

double soft_threshold(double x, double s) {
  if (!(s >= 0.0)) throw InvalidArgument("soft threshold must be >= 0");
  const double mag = std::abs(x) - s;
  if (mag <= 0.0) return 0.0;
  return x < 0.0 ? -mag : mag;
}

SymMatrix soft_threshold(const SymMatrix& a, double s) {
  if (!(s >= 0.0)) throw InvalidArgument("soft_threshold: threshold must be >= 0");
  Matrix m = a.matrix().unaryExpr([s](double x) { return soft_threshold(x, s); });
  return SymMatrix(std::move(m));
}

double frobenius_squared(const Matrix& m) {
  // Neumaier summation over row-major order.
  double sum = 0.0;
  double comp = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double x = m(i, j) * m(i, j);
      const double t = sum + x;
      if (std::abs(sum) >= std::abs(x)) {
        comp += (sum - t) + x;
      } else {
        comp += (x - t) + sum;
      }
      sum = t;
    }
  }
  return sum + comp;
}

double frobenius_squared(const SymMatrix& m) {
  return frobenius_squared(m.matrix());
}

Norms norms(const SymMatrix& a) {
  Norms out;
  out.frobenius = std::sqrt(frobenius_squared(a));
  if (a.dim() == 0) return out;
  const auto ev = eigenvalues(a);
  out.op = std::max(std::abs(ev.front()), std::abs(ev.back()));
  return out;
}

}  // namespace spikediff
