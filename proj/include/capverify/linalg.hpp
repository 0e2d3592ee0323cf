#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "capverify/common.hpp"

namespace capverify {

// Ambient vector, dimension <= 4.
struct Vec {
  std::array<double, 4> v{0.0, 0.0, 0.0, 0.0};
  int dim = 0;

  Vec() = default;
  explicit Vec(int d) : dim(d) {}
  Vec(double a, double b, double c) : v{a, b, c, 0.0}, dim(3) {}
  Vec(double a, double b, double c, double d) : v{a, b, c, d}, dim(4) {}

  double& operator[](int i) { return v[std::size_t(i)]; }
  double operator[](int i) const { return v[std::size_t(i)]; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < dim; ++i) v[std::size_t(i)] += o[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < dim; ++i) v[std::size_t(i)] -= o[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (int i = 0; i < dim; ++i) v[std::size_t(i)] *= s;
    return *this;
  }

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(double s, Vec a) { return a *= s; }
  friend Vec operator*(Vec a, double s) { return a *= s; }
};

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim; ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec zero_vec(int dim) { return Vec(dim); }

inline Vec basis_vec(int dim, int i) {
  Vec e(dim);
  e[i] = 1.0;
  return e;
}

// Euclidean normal direction to n vectors in R^{n+1}, n in {1,2,3}.
inline Vec cross_complement(const Vec* e, int n) {
  const int m = n + 1;
  Vec w(m);
  if (n == 1) {
    w[0] = -e[0][1];
    w[1] = e[0][0];
    return w;
  }
  if (n == 2) {
    w[0] = e[0][1] * e[1][2] - e[0][2] * e[1][1];
    w[1] = e[0][2] * e[1][0] - e[0][0] * e[1][2];
    w[2] = e[0][0] * e[1][1] - e[0][1] * e[1][0];
    return w;
  }
  // n == 3: cofactor expansion of det[w; e0; e1; e2].
  for (int a = 0; a < 4; ++a) {
    double sub[9];
    int c = 0;
    for (int b = 0; b < 4; ++b) {
      if (b == a) continue;
      sub[c] = e[0][b];
      sub[c + 3] = e[1][b];
      sub[c + 6] = e[2][b];
      ++c;
    }
    const double det3 = sub[0] * (sub[4] * sub[8] - sub[5] * sub[7]) -
                        sub[1] * (sub[3] * sub[8] - sub[5] * sub[6]) +
                        sub[2] * (sub[3] * sub[7] - sub[4] * sub[6]);
    w[a] = ((a % 2) == 0 ? 1.0 : -1.0) * det3;
  }
  return w;
}

// Dense row-major matrix with inline storage for small sizes.
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols) : rows_(rows), cols_(cols) {
    if (std::size_t(rows) * std::size_t(cols) > kInline) heap_.assign(std::size_t(rows) * cols, 0.0);
    else inline_.fill(0.0);
  }

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return data()[std::size_t(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data()[std::size_t(i) * cols_ + j]; }

  double* data() { return heap_.empty() ? inline_.data() : heap_.data(); }
  const double* data() const { return heap_.empty() ? inline_.data() : heap_.data(); }

  Mat operator*(const Mat& o) const {
    Mat r(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
      for (int k = 0; k < cols_; ++k) {
        const double a = (*this)(i, k);
        if (a == 0.0) continue;
        for (int j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
      }
    return r;
  }

  Mat operator+(const Mat& o) const {
    Mat r(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r(i, j) = (*this)(i, j) + o(i, j);
    return r;
  }

  Mat operator-(const Mat& o) const {
    Mat r(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r(i, j) = (*this)(i, j) - o(i, j);
    return r;
  }

  Mat scaled(double s) const {
    Mat r(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r(i, j) = s * (*this)(i, j);
    return r;
  }

  Mat transposed() const {
    Mat r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  double trace() const {
    double t = 0.0;
    for (int i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  double max_abs() const {
    double m = 0.0;
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) m = std::max(m, std::abs((*this)(i, j)));
    return m;
  }

 private:
  static constexpr std::size_t kInline = 16;
  int rows_ = 0, cols_ = 0;
  std::array<double, kInline> inline_{};
  std::vector<double> heap_;
};

// Lower-triangular Cholesky factor; returns false if not positive definite.
inline bool cholesky(const Mat& a, Mat& lower) {
  const int n = a.rows();
  lower = Mat(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a(i, j);
      for (int k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k);
      if (i == j) {
        if (s <= 0.0 || !std::isfinite(s)) return false;
        lower(i, i) = std::sqrt(s);
      } else {
        lower(i, j) = s / lower(j, j);
      }
    }
  }
  return true;
}

inline void solve_lower(const Mat& lower, std::vector<double>& b) {
  const int n = lower.rows();
  for (int i = 0; i < n; ++i) {
    double s = b[std::size_t(i)];
    for (int k = 0; k < i; ++k) s -= lower(i, k) * b[std::size_t(k)];
    b[std::size_t(i)] = s / lower(i, i);
  }
}

inline void solve_lower_transposed(const Mat& lower, std::vector<double>& b) {
  const int n = lower.rows();
  for (int i = n - 1; i >= 0; --i) {
    double s = b[std::size_t(i)];
    for (int k = i + 1; k < n; ++k) s -= lower(k, i) * b[std::size_t(k)];
    b[std::size_t(i)] = s / lower(i, i);
  }
}

// SPD solve via Cholesky. Throws NumericalError if not SPD.
inline std::vector<double> solve_spd(const Mat& a, std::vector<double> b) {
  Mat lower;
  if (!cholesky(a, lower)) throw NumericalError("solve_spd: matrix is not positive definite");
  solve_lower(lower, b);
  solve_lower_transposed(lower, b);
  return b;
}

inline Mat inverse_spd(const Mat& a) {
  const int n = a.rows();
  Mat lower;
  if (!cholesky(a, lower)) throw NumericalError("inverse_spd: matrix is not positive definite");
  Mat inv(n, n);
  std::vector<double> col(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    std::fill(col.begin(), col.end(), 0.0);
    col[std::size_t(j)] = 1.0;
    solve_lower(lower, col);
    solve_lower_transposed(lower, col);
    for (int i = 0; i < n; ++i) inv(i, j) = col[std::size_t(i)];
  }
  return inv;
}

struct Eigen {
  std::vector<double> values;  // ascending
  Mat vectors;                 // columns
};

// Cyclic Jacobi for symmetric matrices.
inline Eigen sym_eigen(Mat a, bool want_vectors = true) {
  const int n = a.rows();
  Mat v = Mat::identity(n);
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30 * (1.0 + a.max_abs() * a.max_abs())) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        if (want_vectors) {
          for (int k = 0; k < n; ++k) {
            const double vkp = v(k, p), vkq = v(k, q);
            v(k, p) = c * vkp - s * vkq;
            v(k, q) = s * vkp + c * vkq;
          }
        }
      }
    }
  }
  Eigen e;
  e.values.resize(static_cast<std::size_t>(n));
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[std::size_t(i)] = i;
  std::sort(order.begin(), order.end(), [&](int x, int y) { return a(x, x) < a(y, y); });
  e.vectors = Mat(n, n);
  for (int i = 0; i < n; ++i) {
    e.values[std::size_t(i)] = a(order[std::size_t(i)], order[std::size_t(i)]);
    if (want_vectors)
      for (int k = 0; k < n; ++k) e.vectors(k, i) = v(k, order[std::size_t(i)]);
  }
  return e;
}

// Generalized symmetric eigenproblem A x = lambda B x with B SPD.
// Returns eigenvalues ascending; vectors are B-orthonormal when requested.
inline Eigen gen_sym_eigen(const Mat& a, const Mat& b, bool want_vectors = true) {
  const int n = a.rows();
  Mat lower;
  if (!cholesky(b, lower)) throw NumericalError("gen_sym_eigen: mass matrix is not positive definite");
  // C = L^{-1} A L^{-T}
  Mat c = a;
  for (int j = 0; j < n; ++j) {
    std::vector<double> col(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) col[std::size_t(i)] = c(i, j);
    solve_lower(lower, col);
    for (int i = 0; i < n; ++i) c(i, j) = col[std::size_t(i)];
  }
  for (int i = 0; i < n; ++i) {
    std::vector<double> row(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) row[std::size_t(j)] = c(i, j);
    solve_lower(lower, row);
    for (int j = 0; j < n; ++j) c(i, j) = row[std::size_t(j)];
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double m = 0.5 * (c(i, j) + c(j, i));
      c(i, j) = c(j, i) = m;
    }
  Eigen e = sym_eigen(c, want_vectors);
  if (want_vectors) {
    for (int j = 0; j < n; ++j) {
      std::vector<double> col(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) col[std::size_t(i)] = e.vectors(i, j);
      solve_lower_transposed(lower, col);
      for (int i = 0; i < n; ++i) e.vectors(i, j) = col[std::size_t(i)];
    }
  }
  return e;
}

// Fornberg weights: derivative orders 0..m at point z from arbitrary nodes x.
// Result w(k, j) multiplies f(x_j) in the k-th derivative.
inline Mat fornberg_weights(double z, std::span<const double> x, int m) {
  const int nd = int(x.size()) - 1;
  Mat w(m + 1, nd + 1);
  double c1 = 1.0;
  double c4 = x[0] - z;
  w(0, 0) = 1.0;
  for (int i = 1; i <= nd; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[std::size_t(i)] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[std::size_t(i)] - x[std::size_t(j)];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) w(k, i) = c1 * (k * w(k - 1, i - 1) - c5 * w(k, i - 1)) / c2;
        w(0, i) = -c1 * c5 * w(0, i - 1) / c2;
      }
      for (int k = mn; k >= 1; --k) w(k, j) = (c4 * w(k, j) - k * w(k - 1, j)) / c3;
      w(0, j) = c4 * w(0, j) / c3;
    }
    c1 = c2;
  }
  return w;
}

}  // namespace capverify
