#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "lapcom/common.hpp"

namespace lapcom {

/// Dense row-major matrix. Sized for the small problems this project
/// handles (distance matrices up to a few hundred rows).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const Matrix& o) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct EigenDecomposition {
  std::vector<double> values;  // descending
  Matrix vectors;              // column j pairs with values[j]
};

/// Cyclic Jacobi eigensolver for symmetric matrices. O(n^3) per sweep,
/// deterministic, accurate enough for MDS embeddings.
inline EigenDecomposition symmetric_eigen(Matrix a) {
  const std::size_t n = a.rows();
  require(n == a.cols(), "symmetric_eigen: matrix must be square");
  Matrix v(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  auto off_diag_norm = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  const int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps && off_diag_norm() > 1e-12; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  EigenDecomposition out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  return out;
}

/// Classical (Torgerson) MDS of a dissimilarity matrix into 2-D.
/// The input is symmetrized, double-centered and reduced to its top two
/// eigenpairs; non-positive eigenvalues yield zero coordinates. Each output
/// column carries a deterministic sign: the entry of largest magnitude is
/// made positive, so embeddings are reproducible.
inline std::vector<Vec2> classical_mds_2d(const Matrix& dist) {
  const std::size_t n = dist.rows();
  require(n == dist.cols(), "classical_mds_2d: matrix must be square");
  if (n == 1) return {Vec2{0.0, 0.0}};

  Matrix b(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double d = 0.5 * (dist(i, j) + dist(j, i));
      b(i, j) = -0.5 * d * d;
    }
  std::vector<double> row_mean(n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) row_mean[i] += b(i, j);
    row_mean[i] /= static_cast<double>(n);
    total += row_mean[i];
  }
  total /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) b(i, j) += total - row_mean[i] - row_mean[j];

  EigenDecomposition eig = symmetric_eigen(b);
  std::vector<Vec2> coords(n);
  for (int d = 0; d < 2; ++d) {
    if (static_cast<std::size_t>(d) >= n || eig.values[d] <= 0.0) continue;
    const double scale = std::sqrt(eig.values[d]);
    std::size_t arg = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(eig.vectors(i, d)) > std::abs(eig.vectors(arg, d))) arg = i;
    const double sign = eig.vectors(arg, d) < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double val = sign * scale * eig.vectors(i, d);
      if (d == 0)
        coords[i].x = val;
      else
        coords[i].y = val;
    }
  }
  return coords;
}

/// Solves A x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> solve_linear(Matrix a, std::vector<double> b) {
  const std::size_t n = a.rows();
  require(n == a.cols() && n == b.size(), "solve_linear: shape mismatch");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t i = col + 1; i < n; ++i)
      if (std::abs(a(i, col)) > std::abs(a(piv, col))) piv = i;
    if (std::abs(a(piv, col)) < 1e-14) throw std::runtime_error("solve_linear: singular matrix");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
      std::swap(b[col], b[piv]);
    }
    for (std::size_t i = col + 1; i < n; ++i) {
      const double f = a(i, col) / a(col, col);
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) a(i, j) -= f * a(col, j);
      b[i] -= f * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= a(ii, j) * x[j];
    x[ii] = s / a(ii, ii);
  }
  return x;
}

/// SVD of a 2x2 matrix: m = u * diag(s) * v^T with s[0] >= s[1] >= 0 and
/// u, v orthogonal (possibly reflections).
struct Svd2 {
  double u[2][2];
  double s[2];
  double v[2][2];
};

inline Svd2 svd_2x2(const double m[2][2]) {
  // Eigen-decompose m^T m for V and singular values, then recover U.
  const double a = m[0][0] * m[0][0] + m[1][0] * m[1][0];
  const double b = m[0][0] * m[0][1] + m[1][0] * m[1][1];
  const double c = m[0][1] * m[0][1] + m[1][1] * m[1][1];
  const double tr = a + c;
  const double det = a * c - b * b;
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
  const double l1 = tr / 2.0 + disc;
  const double l2 = std::max(0.0, tr / 2.0 - disc);

  Svd2 out{};
  out.s[0] = std::sqrt(std::max(0.0, l1));
  out.s[1] = std::sqrt(l2);

  double v1x, v1y;
  if (std::abs(b) > 1e-300) {
    v1x = l1 - c;
    v1y = b;
  } else if (a >= c) {
    v1x = 1.0;
    v1y = 0.0;
  } else {
    v1x = 0.0;
    v1y = 1.0;
  }
  const double nv = std::hypot(v1x, v1y);
  v1x /= nv;
  v1y /= nv;
  out.v[0][0] = v1x;
  out.v[1][0] = v1y;
  out.v[0][1] = -v1y;
  out.v[1][1] = v1x;

  for (int j = 0; j < 2; ++j) {
    double ux = m[0][0] * out.v[0][j] + m[0][1] * out.v[1][j];
    double uy = m[1][0] * out.v[0][j] + m[1][1] * out.v[1][j];
    const double nu = std::hypot(ux, uy);
    if (nu > 1e-300) {
      ux /= nu;
      uy /= nu;
    } else if (j == 1) {
      // Null second column: complete an orthonormal basis.
      ux = -out.u[1][0];
      uy = out.u[0][0];
    } else {
      ux = 1.0;
      uy = 0.0;
    }
    out.u[0][j] = ux;
    out.u[1][j] = uy;
  }
  return out;
}

}  // namespace lapcom
