#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace lpp {

/** Dense square matrix stored row-major. */
template <class T = std::complex<double>>
struct Matrix {
  std::size_t n = 0;
  std::vector<T> a;

  Matrix() = default;
  explicit Matrix(std::size_t dim) : n(dim), a(dim * dim, T{}) {}

  T& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }

  static Matrix identity(std::size_t dim) {
    Matrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = T{1};
    return m;
  }

  /** Copy with row r and column c removed. */
  Matrix minor(std::size_t r, std::size_t c) const {
    Matrix m(n - 1);
    for (std::size_t i = 0, ii = 0; i < n; ++i) {
      if (i == r) continue;
      for (std::size_t j = 0, jj = 0; j < n; ++j) {
        if (j == c) continue;
        m(ii, jj++) = (*this)(i, j);
      }
      ++ii;
    }
    return m;
  }
};

/** Vandermonde product over i<j of (w_j - w_i); 1 for fewer than two entries. */
template <class Vec>
auto delta(const Vec& w) {
  using T = std::decay_t<decltype(w[0])>;
  T prod{1};
  for (std::size_t j = 0; j < w.size(); ++j)
    for (std::size_t i = 0; i < j; ++i) prod *= (w[j] - w[i]);
  return prod;
}

/** Cross product over all i, i' of (w_i - w'_{i'}). */
template <class Vec>
auto delta_cross(const Vec& w, const Vec& wp) {
  using T = std::decay_t<decltype(w[0])>;
  T prod{1};
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < wp.size(); ++j) prod *= (w[i] - wp[j]);
  return prod;
}

/** Product of f(w_i) over the entries; 1 on an empty vector. */
template <class F, class Vec>
auto prod_apply(F&& f, const Vec& w) {
  using T = std::decay_t<decltype(f(w[0]))>;
  T prod{1};
  for (std::size_t i = 0; i < w.size(); ++i) prod *= f(w[i]);
  return prod;
}

/** Cauchy-type factor delta(W) delta(W') / delta_cross(W, W'). */
template <class Vec>
auto cauchy_factor(const Vec& w, const Vec& wp) {
  auto den = delta_cross(w, wp);
  if (den == decltype(den){0}) throw std::domain_error("cauchy_factor: W and W' overlap");
  return delta(w) * delta(wp) / den;
}

/** Determinant by LU factorization with partial pivoting on magnitude; overwrites `m`. */
template <class T>
T determinant_in_place(Matrix<T>& m) {
  const std::size_t n = m.n;
  T det{1};
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(m(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      double v = std::abs(m(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best == 0.0) return T{0};
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
      det = -det;
    }
    const T pivot = m(k, k);
    det *= pivot;
    for (std::size_t i = k + 1; i < n; ++i) {
      const T f = m(i, k) / pivot;
      if (f == T{0}) continue;
      for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  return det;
}

/** Determinant by LU factorization with partial pivoting on magnitude. */
template <class T>
T determinant(Matrix<T> m) {
  return determinant_in_place(m);
}

}  // namespace lpp
