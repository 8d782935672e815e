#pragma once

// Airy function by contour quadrature, the Airy kernel, and the GUE
// Tracy-Widom distribution as a Fredholm determinant.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "lpp/contour.hpp"
#include "lpp/multilinear.hpp"

namespace lpp {

namespace detail {

/**
 * Ray pairs for the Airy integral. For x >= 0 the rays leave the saddle point
 * -sqrt(x) at angles +-2pi/3 (stored at anchor 0 and translated). For x < 0
 * they leave 0.5 at angles +-0.55 pi, which keeps them close to the two
 * saddle points on the imaginary axis and avoids cancellation.
 */
inline const Contour& airy_contour_right() {
  static const Contour c = ray_pair(0.0, 2.0 * pi / 3.0, 8.0, 16, 16);
  return c;
}
inline const Contour& airy_contour_left() {
  static const Contour c = ray_pair(0.5, 0.55 * pi, 10.0, 16, 16);
  return c;
}

/** (Ai(x), Ai'(x)) with no range check. */
inline std::pair<double, double> airy_pair(double x) {
  const bool right = x >= 0.0;
  const Contour& c = right ? airy_contour_right() : airy_contour_left();
  const double shift = right ? -std::sqrt(x) : 0.0;
  cplx a{0.0}, d{0.0};
  for (std::size_t k = 0; k < c.size(); ++k) {
    const cplx z = c.nodes[k] + shift;
    const cplx e = c.weights[k] * std::exp(-z * z * z / 3.0 + x * z);
    a += e;
    d += e * z;
  }
  return {a.real(), d.real()};
}

inline void check_airy_range(double x) {
  if (!(std::abs(x) <= 20.0)) throw std::domain_error("airy: |x| must not exceed 20");
}

}  // namespace detail

/** Ai(x) from the integral of exp(-z^3/3 + x z) over a ray pair opening to the left. */
inline double airy(double x) {
  detail::check_airy_range(x);
  return detail::airy_pair(x).first;
}

/** Ai'(x) from the same contour with an extra factor z. */
inline double airy_prime(double x) {
  detail::check_airy_range(x);
  return detail::airy_pair(x).second;
}

/** (Ai(x)Ai'(y) - Ai'(x)Ai(y)) / (x - y), with the diagonal limit Ai'(x)^2 - x Ai(x)^2. */
inline double airy_kernel(double x, double y) {
  const auto [ax, dx] = detail::airy_pair(x);
  if (std::abs(x - y) < 1e-6) return dx * dx - x * ax * ax;
  const auto [ay, dy] = detail::airy_pair(y);
  return (ax * dy - dx * ay) / (x - y);
}

/** Nystrom settings for det(I - K_Airy) on [s, inf). */
struct FredholmConfig {
  int order = 40;      ///< Gauss-Legendre nodes in the mapped variable
  double scale = 4.0;  ///< L in t = s + L (1+u)/(1-u)
};

namespace detail {

/** Symmetrized Nystrom matrix sqrt(w_i) K(t_i, t_j) sqrt(w_j) on [s, inf). */
inline Matrix<double> airy_nystrom(double s, const FredholmConfig& cfg) {
  if (cfg.order < 8) throw std::invalid_argument("fgue: order must be at least 8");
  if (!(cfg.scale > 0.0)) throw std::invalid_argument("fgue: scale must be positive");
  std::vector<double> u, w;
  gauss_legendre(cfg.order, u, w);
  const std::size_t n = u.size();
  std::vector<double> t(n), sw(n), ai(n), aip(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = s + cfg.scale * (1.0 + u[i]) / (1.0 - u[i]);
    sw[i] = std::sqrt(w[i] * 2.0 * cfg.scale / ((1.0 - u[i]) * (1.0 - u[i])));
    // Beyond 20 the Airy function is below 2e-27 and the kernel is negligible.
    if (t[i] <= 20.0) {
      const auto [a, d] = airy_pair(t[i]);
      ai[i] = a;
      aip[i] = d;
    } else {
      ai[i] = aip[i] = 0.0;
    }
  }
  Matrix<double> K(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double k;
      if (i == j) k = aip[i] * aip[i] - t[i] * ai[i] * ai[i];
      else k = (ai[i] * aip[j] - aip[i] * ai[j]) / (t[i] - t[j]);
      K(i, j) = sw[i] * k * sw[j];
    }
  return K;
}

}  // namespace detail

/** F_GUE(s) = det(I - K_Airy) on L^2(s, inf), by Nystrom quadrature. */
inline double fgue(double s, const FredholmConfig& cfg = {}) {
  if (!(s >= -10.0)) throw std::domain_error("fgue: s must be at least -10");
  Matrix<double> K = detail::airy_nystrom(s, cfg);
  Matrix<double> A = Matrix<double>::identity(K.n);
  for (std::size_t k = 0; k < K.a.size(); ++k) A.a[k] -= K.a[k];
  return determinant(A);
}

}  // namespace lpp
