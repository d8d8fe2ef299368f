#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "optbal/dual.hpp"
#include "optbal/errors.hpp"

namespace optbal {

using Vector = std::vector<double>;

template <class S>
using VecT = std::vector<S>;

template <class S>
inline VecT<S> zeros_like(std::size_t n) {
  return VecT<S>(n, scalar_const<S>(0.0));
}

/// Applies the standard symplectic block matrix J = [[0, I], [-I, 0]]
/// without materializing it.  Requires even length.
template <class S>
inline VecT<S> apply_symplectic(const VecT<S>& v) {
  const std::size_t h = v.size() / 2;
  VecT<S> out(v.size(), scalar_const<S>(0.0));
  for (std::size_t i = 0; i < h; ++i) out[i] = v[h + i];
  for (std::size_t i = 0; i < h; ++i) out[h + i] = -v[i];
  return out;
}

template <class S>
inline VecT<S> negated(VecT<S> v) {
  for (auto& x : v) x = -x;
  return v;
}

/// Promotes q to dual values seeded with a direction (Jacobian-vector probe).
template <class S>
inline VecT<Dual<S>> seed_direction(const VecT<S>& q, const VecT<S>& dir) {
  VecT<Dual<S>> out;
  out.reserve(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) out.push_back(Dual<S>{q[i], dir[i]});
  return out;
}

/// Promotes q to dual constants (zero derivative parts).
template <class S>
inline VecT<Dual<S>> seed_constant(const VecT<S>& q) {
  VecT<Dual<S>> out;
  out.reserve(q.size());
  for (const auto& x : q) out.push_back(Dual<S>{x, scalar_const<S>(0.0)});
  return out;
}

template <class S>
inline VecT<S> derivative_parts(const VecT<Dual<S>>& v) {
  VecT<S> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(x.der);
  return out;
}

inline double norm2(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline Vector vadd(Vector a, const Vector& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

inline Vector vsub(Vector a, const Vector& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

inline Vector vscale(Vector a, double c) {
  for (auto& x : a) x *= c;
  return a;
}

/// a + c*b
inline Vector vaxpy(Vector a, double c, const Vector& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += c * b[i];
  return a;
}

inline bool all_finite(const Vector& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

/// Small dense row-major matrix; enough for shooting Jacobians and tests.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
};

inline Vector matvec(const Matrix& m, const Vector& v) {
  Vector out(m.rows, 0.0);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) out[i] += m(i, j) * v[j];
  return out;
}

inline Matrix matmul(const Matrix& x, const Matrix& y) {
  Matrix out(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k)
      for (int j = 0; j < y.cols; ++j) out(i, j) += x(i, k) * y(k, j);
  return out;
}

/// Solves Ax = b by Gaussian elimination with partial pivoting.
inline Vector solve_linear(Matrix m, Vector b) {
  if (m.rows != m.cols || m.rows != static_cast<int>(b.size()))
    throw Error("solve_linear: shape mismatch");
  const int n = m.rows;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
    if (m(piv, col) == 0.0) throw Error("solve_linear: singular matrix");
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(m(piv, j), m(col, j));
      std::swap(b[piv], b[col]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double f = m(r, col) / m(col, col);
      if (f == 0.0) continue;
      for (int j = col; j < n; ++j) m(r, j) -= f * m(col, j);
      b[r] -= f * b[col];
    }
  }
  Vector x(n, 0.0);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= m(i, j) * x[j];
    x[i] = s / m(i, i);
  }
  return x;
}

}  // namespace optbal
