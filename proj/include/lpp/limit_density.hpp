#pragma once

// Limiting joint density of the scaled geodesic location and the two scaled
// passage times. Variables xi live on contours opening to the left and eta on
// contours opening to the right; the series has the same pair structure as
// the finite one, so the shared series engine evaluates it.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpp/airy.hpp"
#include "lpp/contour.hpp"
#include "lpp/dlpp.hpp"
#include "lpp/finite_density.hpp"
#include "lpp/report.hpp"
#include "lpp/series_engine.hpp"

namespace lpp {

/** rm f1 for level 1, rm f2 for level 2: cubic exponentials in zeta. */
inline cplx rm_f(int level, cplx zeta, double s, double x, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("rm_f: gamma must lie in (0,1)");
  const cplx z2 = zeta * zeta;
  if (level == 1) return std::exp(-gamma / 3.0 * z2 * zeta - 0.5 * x * z2 + (s - x * x / (4.0 * gamma)) * zeta);
  if (level == 2) {
    const double g = 1.0 - gamma;
    return std::exp(-g / 3.0 * z2 * zeta + 0.5 * x * z2 + (s - x * x / (4.0 * g)) * zeta);
  }
  throw std::invalid_argument("rm_f: level must be 1 or 2");
}

/** Power-sum difference S_ell for ell in {1,2,3}. */
inline cplx s_ell(int ell, const std::vector<cplx>& xi1, const std::vector<cplx>& eta1,
                  const std::vector<cplx>& xi2, const std::vector<cplx>& eta2) {
  if (ell < 1 || ell > 3) throw std::invalid_argument("s_ell: ell must be 1, 2 or 3");
  if (xi1.size() != eta1.size() || xi2.size() != eta2.size())
    throw std::invalid_argument("s_ell: xi and eta sizes must match per level");
  cplx s{0.0};
  for (std::size_t i = 0; i < xi1.size(); ++i) s += ipow(xi1[i], ell) - ipow(eta1[i], ell);
  for (std::size_t i = 0; i < xi2.size(); ++i) s -= ipow(xi2[i], ell) - ipow(eta2[i], ell);
  return s;
}

/** S1^4/12 + S2^2/4 - S1 S3/3. */
inline cplx rm_H_from(cplx S1, cplx S2, cplx S3) {
  const cplx S1sq = S1 * S1;
  return S1sq * S1sq / 12.0 + S2 * S2 / 4.0 - S1 * S3 / 3.0;
}

inline cplx rm_H(const std::vector<cplx>& xi1, const std::vector<cplx>& eta1, const std::vector<cplx>& xi2,
                 const std::vector<cplx>& eta2) {
  return rm_H_from(s_ell(1, xi1, eta1, xi2, eta2), s_ell(2, xi1, eta1, xi2, eta2), s_ell(3, xi1, eta1, xi2, eta2));
}

/**
 * Contour family of the limiting series: six hyperbolic contours with real
 * anchors, left arms asymptotic to directions near exp(+-2pi i/3) and right
 * arms near exp(+-pi i/3). Each contour uses the trapezoid rule in its
 * hyperbolic parameter; the step depends on the term order and the range is
 * cut where the single-variable factor has decayed below `truncation`.
 */
struct LimitQuadrature {
  std::array<double, 3> left_anchors{-0.9, -0.6, -0.3};  ///< (in, mid, out)
  std::array<double, 3> right_anchors{0.3, 0.6, 0.9};    ///< (out, mid, in)
  std::array<double, 3> left_angles{2.0 * pi / 3.0 + 0.25, 2.0 * pi / 3.0, 2.0 * pi / 3.0 - 0.25};
  std::array<double, 3> right_angles{pi / 3.0 + 0.25, pi / 3.0, pi / 3.0 - 0.25};
  /** True: right contours run from the upper end to the lower end. */
  bool right_upper_to_lower = true;
  double step_low = 0.06;   ///< k1+k2 <= 2
  double step_mid = 0.1;    ///< k1+k2 == 3
  double step_high = 0.25;  ///< k1+k2 >= 4
  double truncation = 1e-17;
  double max_range = 6.0;
  double z_radius = 0.5;
  int z_nodes = 64;
  /** Visit one set per conjugate orbit; the imaginary residue is then exactly zero. */
  bool use_conjugation = true;

  double step_for(int k1, int k2) const {
    const int k = k1 + k2;
    return k <= 2 ? step_low : (k == 3 ? step_mid : step_high);
  }

  void validate() const {
    if (!(left_anchors[0] < left_anchors[1] && left_anchors[1] < left_anchors[2] && left_anchors[2] < 0.0))
      throw std::invalid_argument("LimitQuadrature: left anchors must be negative and increase from in to out");
    if (!(0.0 < right_anchors[0] && right_anchors[0] < right_anchors[1] && right_anchors[1] < right_anchors[2]))
      throw std::invalid_argument("LimitQuadrature: right anchors must be positive and increase from out to in");
    for (double a : left_angles)
      if (!(a > pi / 2.0 && a < 5.0 * pi / 6.0))
        throw std::invalid_argument("LimitQuadrature: left angles must lie in (pi/2, 5pi/6)");
    for (double a : right_angles)
      if (!(a > pi / 6.0 && a < pi / 2.0))
        throw std::invalid_argument("LimitQuadrature: right angles must lie in (pi/6, pi/2)");
    // Nested contours stay disjoint when the inner one opens at least as wide.
    if (!(left_angles[0] >= left_angles[1] && left_angles[1] >= left_angles[2]))
      throw std::invalid_argument("LimitQuadrature: left angles must not decrease from out to in");
    if (!(right_angles[2] <= right_angles[1] && right_angles[1] <= right_angles[0]))
      throw std::invalid_argument("LimitQuadrature: right angles must not increase from out to in");
    for (double st : {step_low, step_mid, step_high})
      if (!(st > 0.0)) throw std::invalid_argument("LimitQuadrature: steps must be positive");
    if (!(truncation > 0.0 && truncation < 1e-6)) throw std::invalid_argument("LimitQuadrature: truncation must lie in (0, 1e-6)");
    if (!(max_range > 0.0)) throw std::invalid_argument("LimitQuadrature: max_range must be positive");
    if (!(z_radius > 0.0 && z_radius < 1.0)) throw std::invalid_argument("LimitQuadrature: z radius must lie in (0,1)");
  }

  /** Left contour `which` in (in, mid, out) order, over the full range. */
  Contour left(int which, double step) const {
    return hyperbola(left_anchors[which], left_angles[which], step, max_range);
  }
  /** Right contour `which` in (out, mid, in) order, over the full range. */
  Contour right(int which, double step) const {
    Contour c = hyperbola(right_anchors[which], right_angles[which], step, max_range);
    if (right_upper_to_lower)
      for (auto& w : c.weights) w = -w;
    return c;
  }

  /** Wider steps on the expensive terms; about 2e-5 relative error on the density at the origin. */
  static LimitQuadrature coarse() {
    LimitQuadrature q;
    q.step_low = 0.1;
    q.step_mid = 0.25;
    q.step_high = 0.35;
    return q;
  }

  /** The same family with every anchor moved by `delta` away from the imaginary axis. */
  LimitQuadrature shifted(double delta) const {
    LimitQuadrature q = *this;
    for (auto& a : q.left_anchors) a -= delta;
    for (auto& a : q.right_anchors) a += delta;
    return q;
  }
};

/** Which integral of the limiting density a series evaluation returns. */
enum class LimitQuantity {
  Density,    ///< p(s1, s2, x)
  Tail,       ///< integral over [t1, inf) x [t2, inf)
  SecondTail  ///< integral over s2 in [t2, inf) at fixed s1
};

/** Truncation and quadrature settings of the limiting series. */
struct LimitConfig {
  int kmax = 2;
  LimitQuadrature quad;
};

namespace detail {

/** Contributions of one limit variable to (S1, S2, S3, D1, D2). */
inline Moments limit_moments(int group, cplx x) {
  const cplx x2 = x * x, x3 = x2 * x;
  Moments m;
  switch (group) {
    case GroupU1: m.s = {x, x2, x3, x, 0.0}; break;
    case GroupV1: m.s = {-x, -x2, -x3, -x, 0.0}; break;
    case GroupU2: m.s = {-x, -x2, -x3, 0.0, x}; break;
    default: m.s = {x, x2, x3, 0.0, -x}; break;
  }
  return m;
}

/**
 * H = S1^4/12 + S2^2/4 - S1 S3/3. For the joint tail it is divided by D1 D2;
 * for the tail in s2 alone it is divided by -D2.
 */
template <LimitQuantity Q>
struct LimitFinish {
  static constexpr int additive_channels = Q == LimitQuantity::Density ? 3 : 5;
  static constexpr bool uses_product = false;
  void operator()(const Channels& c, double& hr, double& hi) const {
    const double s1r = c.r[0], s1i = c.i[0], s2r = c.r[1], s2i = c.i[1], s3r = c.r[2], s3i = c.i[2];
    const double q1r = s1r * s1r - s1i * s1i, q1i = 2.0 * s1r * s1i;
    const double q4r = q1r * q1r - q1i * q1i, q4i = 2.0 * q1r * q1i;
    const double q2r = s2r * s2r - s2i * s2i, q2i = 2.0 * s2r * s2i;
    const double m3r = s1r * s3r - s1i * s3i, m3i = s1r * s3i + s1i * s3r;
    hr = q4r / 12.0 + q2r / 4.0 - m3r / 3.0;
    hi = q4i / 12.0 + q2i / 4.0 - m3i / 3.0;
    if constexpr (Q != LimitQuantity::Density) {
      double qr, qi;
      if constexpr (Q == LimitQuantity::Tail) {
        qr = c.r[3] * c.r[4] - c.i[3] * c.i[4];
        qi = c.r[3] * c.i[4] + c.i[3] * c.r[4];
      } else {
        qr = -c.r[4];
        qi = -c.i[4];
      }
      const double inv = 1.0 / (qr * qr + qi * qi);
      const double tr = (hr * qr + hi * qi) * inv;
      hi = (hi * qr - hr * qi) * inv;
      hr = tr;
    }
  }
};

/**
 * Drop the symmetric ends of a conjugation-symmetric contour where
 * |weight * single| * (1 + |w|)^8 is below `tol` times its maximum.
 */
template <class F>
Contour truncate_contour(const Contour& c, F&& single, double tol) {
  const std::size_t n = c.size();
  std::vector<double> g(n);
  double gmax = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double r = 1.0 + std::abs(c.nodes[k]);
    const double r2 = r * r, r4 = r2 * r2;
    g[k] = std::abs(c.weights[k] * single(c.nodes[k])) * r4 * r4;
    if (!std::isfinite(g[k]))
      throw QuadratureError("limit contour: single-variable factor overflows on " + c.describe(), {c.nodes[k]});
    gmax = std::max(gmax, g[k]);
  }
  std::size_t cut = 0;
  while (cut < n / 2 && g[cut] < tol * gmax && g[n - 1 - cut] < tol * gmax) ++cut;
  if (cut == 0 && n > 1)
    throw QuadratureError("limit contour: integrand has not decayed at the range end of " + c.describe(), {c.nodes[0]});
  Contour t = c;
  t.nodes.assign(c.nodes.begin() + cut, c.nodes.end() - cut);
  t.weights.assign(c.weights.begin() + cut, c.weights.end() - cut);
  t.half_range = c.step * static_cast<double>((t.nodes.size() - 1) / 2);
  return t;
}

inline std::array<GroupNodes, 4> limit_groups(double a1, double a2, double x, double gamma,
                                              const LimitQuadrature& q, double step) {
  auto f1u = [&](cplx w) { return rm_f(1, w, a1, x, gamma); };
  auto f1v = [&](cplx w) { return 1.0 / rm_f(1, w, a1, x, gamma); };
  auto f2u = [&](cplx w) { return rm_f(2, w, a2, x, gamma); };
  auto f2v = [&](cplx w) { return 1.0 / rm_f(2, w, a2, x, gamma); };
  // Index 0/1/2 of left_anchors is (in, mid, out); of right_anchors it is (out, mid, in).
  const Contour Lin = truncate_contour(q.left(0, step), f1u, q.truncation);
  const Contour Lmid = truncate_contour(q.left(1, step), f2u, q.truncation);
  const Contour Lout = truncate_contour(q.left(2, step), f1u, q.truncation);
  const Contour Rout = truncate_contour(q.right(0, step), f1v, q.truncation);
  const Contour Rmid = truncate_contour(q.right(1, step), f2v, q.truncation);
  const Contour Rin = truncate_contour(q.right(2, step), f1v, q.truncation);
  std::array<GroupNodes, 4> g;
  auto add = [&](int group, const Contour& c, bool outer, auto&& single) {
    for (std::size_t k = 0; k < c.size(); ++k)
      g[group].push(c.nodes[k], c.weights[k] * single(c.nodes[k]), outer, limit_moments(group, c.nodes[k]));
  };
  add(GroupU1, Lin, false, f1u);
  add(GroupU1, Lout, true, f1u);
  add(GroupV1, Rin, false, f1v);
  add(GroupV1, Rout, true, f1v);
  add(GroupU2, Lmid, false, f2u);
  add(GroupV2, Rmid, false, f2v);
  return g;
}

inline SeriesCoefficients limit_coefficients(int k1, int k2, double a1, double a2, double x, double gamma,
                                             const LimitQuadrature& q, double step, LimitQuantity what, int jmax,
                                             int* mid_nodes = nullptr) {
  const auto g = limit_groups(a1, a2, x, gamma, q, step);
  if (mid_nodes != nullptr) *mid_nodes = static_cast<int>(g[GroupU2].size());
  SeriesOptions opt;
  opt.conjugate_symmetric = q.use_conjugation;
  const std::array<const GroupNodes*, 4> gp{&g[0], &g[1], &g[2], &g[3]};
  switch (what) {
    case LimitQuantity::Tail: return series_coefficients(k1, k2, gp, jmax, LimitFinish<LimitQuantity::Tail>{}, opt);
    case LimitQuantity::SecondTail:
      return series_coefficients(k1, k2, gp, jmax, LimitFinish<LimitQuantity::SecondTail>{}, opt);
    default: return series_coefficients(k1, k2, gp, jmax, LimitFinish<LimitQuantity::Density>{}, opt);
  }
}

inline void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("limit: gamma must lie in (0,1)");
}

}  // namespace detail

/** One limiting series term at a point z of the z-circle, ordered-tuple normalization. */
inline cplx term_rmT(int k1, int k2, cplx z, double s1, double s2, double x, double gamma,
                     const LimitQuadrature& quad) {
  if (k1 < 1 || k2 < 1) throw std::invalid_argument("term_rmT: k1, k2 must be at least 1");
  detail::check_gamma(gamma);
  quad.validate();
  const auto coeff = detail::limit_coefficients(k1, k2, s1, s2, x, gamma, quad, quad.step_for(k1, k2), LimitQuantity::Density, 2 * k1);
  cplx poly{0.0};
  for (int j = 2 * k1; j >= 0; --j) poly = poly * (-z) + coeff.c[j];
  const double perms = detail::factorial(k1) * detail::factorial(k2);
  return perms * perms * ipow(1.0 - z, k2 - 2 * k1) * ipow(1.0 - 1.0 / z, k1) * poly;
}

/** Contribution of term (k1, k2) to the limiting density or tail, after the z-integral. */
inline TermRecord limit_term_contribution(int k1, int k2, double a1, double a2, double x, double gamma,
                                          const LimitQuadrature& quad, LimitQuantity what) {
  if (k1 < 1 || k2 < 1) throw std::invalid_argument("limit term: k1, k2 must be at least 1");
  detail::check_gamma(gamma);
  quad.validate();
  Stopwatch clock;
  int nodes = 0;
  const auto coeff = detail::limit_coefficients(k1, k2, a1, a2, x, gamma, quad, quad.step_for(k1, k2), what,
                                                z_kernel_jmax(k1), &nodes);
  TermRecord t;
  t.k1 = k1;
  t.k2 = k2;
  t.value = detail::z_integrated(k1, k2, coeff.c, quad.z_radius, quad.z_nodes);
  t.max_abs = coeff.max_abs;
  t.nodes = nodes;
  t.runtime_ms = clock.ms();
  return t;
}

namespace detail {

inline EstimateReport limit_series(const std::string& quantity, double a1, double a2, double x, double gamma,
                                   const LimitConfig& config, LimitQuantity what) {
  check_gamma(gamma);
  if (config.kmax < 1) throw std::invalid_argument("limit: kmax must be at least 1");
  config.quad.validate();
  Stopwatch clock;
  EstimateReport rep;
  rep.quantity = quantity;
  for (int k1 = 1; k1 <= config.kmax; ++k1)
    for (int k2 = 1; k2 <= config.kmax; ++k2) {
      TermRecord t = limit_term_contribution(k1, k2, a1, a2, x, gamma, config.quad, what);
      rep.value += t.value;
      rep.terms.push_back(t);
    }
  rep.error_estimate = rep.terms.empty() ? 0.0 : std::abs(rep.terms.back().value);
  rep.runtime_ms = clock.ms();
  return rep;
}

}  // namespace detail

/** Limiting joint density p(s1, s2, x; gamma). */
inline EstimateReport limit_density(double s1, double s2, double x, double gamma, const LimitConfig& config = {}) {
  return detail::limit_series("limit_density", s1, s2, x, gamma, config, LimitQuantity::Density);
}

/** Integral of the limiting density over [t1, inf) x [t2, inf) in (s1, s2). */
inline EstimateReport limit_tail(double t1, double t2, double x, double gamma, const LimitConfig& config = {}) {
  return detail::limit_series("limit_tail", t1, t2, x, gamma, config, LimitQuantity::Tail);
}

/** Integral of the limiting density over s2 in [t2, inf) at fixed s1. */
inline EstimateReport limit_second_tail(double s1, double t2, double x, double gamma, const LimitConfig& config = {}) {
  return detail::limit_series("limit_second_tail", s1, t2, x, gamma, config, LimitQuantity::SecondTail);
}

/** Trapezoid grids for the outer s and x integrals. */
struct OuterGrid {
  double spacing = 0.25;
  double s_lo = -8.0;  ///< stands in for -infinity
  double s_hi = 6.0;
  double x_lo = -4.0;
  double x_hi = 4.0;

  void validate() const {
    if (!(spacing > 0.0)) throw std::invalid_argument("OuterGrid: spacing must be positive");
    if (!(s_lo < s_hi && x_lo < x_hi)) throw std::invalid_argument("OuterGrid: empty range");
  }
};

namespace detail {

/** Trapezoid nodes and weights on [lo, hi] with spacing at most h. */
inline void trapezoid_grid(double lo, double hi, double h, std::vector<double>& x, std::vector<double>& w) {
  const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / h - 1e-12)));
  const double step = (hi - lo) / n;
  x.resize(n + 1);
  w.assign(n + 1, step);
  for (int i = 0; i <= n; ++i) x[i] = lo + i * step;
  w[0] = w[n] = 0.5 * step;
}

}  // namespace detail

/** Outer trapezoid over x in [x_lo, x_hi] of limit_tail(t1, t2, x). */
inline EstimateReport cdf_over_x(double t1, double t2, double x_lo, double x_hi, double gamma, double spacing,
                                 const LimitConfig& config = {}) {
  if (!(x_lo < x_hi)) throw std::invalid_argument("cdf_over_x: need x_lo < x_hi");
  if (!(spacing > 0.0)) throw std::invalid_argument("cdf_over_x: spacing must be positive");
  Stopwatch clock;
  std::vector<double> xs, ws;
  detail::trapezoid_grid(x_lo, x_hi, spacing, xs, ws);
  EstimateReport rep;
  rep.quantity = "cdf_over_x";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const EstimateReport r = limit_tail(t1, t2, xs[i], gamma, config);
    rep.value += ws[i] * r.value;
    rep.error_estimate += ws[i] * r.error_estimate;
  }
  rep.runtime_ms = clock.ms();
  return rep;
}

/** Value of the shifted triple integral and the Fredholm value it should equal. */
struct FgueComparison {
  double value = 0.0;
  double oracle = 0.0;
  double runtime_ms = 0.0;
};

/**
 * Integral over x and over {s1 + s2 <= s} of
 * p(s1 + x^2/(4 gamma), s2 + x^2/(4 (1-gamma)), x), against F_GUE(s). The
 * inner s2 integral is a difference of two tails in s2; s1 and x use
 * trapezoid grids, with s_lo standing in for -infinity.
 */
inline FgueComparison fgue_consistency(double s, double gamma, const LimitConfig& config = {},
                                       const OuterGrid& grid = {}) {
  detail::check_gamma(gamma);
  grid.validate();
  Stopwatch clock;
  std::vector<double> xs, wx, ss, wsg;
  detail::trapezoid_grid(grid.x_lo, grid.x_hi, grid.spacing, xs, wx);
  detail::trapezoid_grid(grid.s_lo, grid.s_hi, grid.spacing, ss, wsg);
  double total = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    const double a = x * x / (4.0 * gamma), b = x * x / (4.0 * (1.0 - gamma));
    double inner = 0.0;
    for (std::size_t j = 0; j < ss.size(); ++j) {
      const double s1 = ss[j];
      if (s - s1 <= grid.s_lo) continue;
      const double full = limit_second_tail(s1 + a, grid.s_lo + b, x, gamma, config).value.real();
      const double upper = limit_second_tail(s1 + a, s - s1 + b, x, gamma, config).value.real();
      inner += wsg[j] * (full - upper);
    }
    total += wx[i] * inner;
  }
  FgueComparison out;
  out.value = total;
  out.oracle = fgue(s);
  out.runtime_ms = clock.ms();
  return out;
}

/** Lattice parameters and absolute thresholds for given scaled coordinates. */
struct ScaledPoint {
  FiniteParams params;  ///< (m, n, M, N) with a right step
  double t1 = 0.0;      ///< threshold for L_{(1,1)}(m,n)
  double t2 = 0.0;      ///< threshold for L_{(m+1,n)}(M,N)
  double t2_up = 0.0;   ///< threshold for L_{(m,n+1)}(M,N)
  double x = 0.0;       ///< x2 - x1
};

/** Maps (N, alpha, gamma, x1, x2, t1, t2) to lattice indices and centred thresholds. */
inline ScaledPoint scaling_map(int N, double alpha, double gamma, double x1, double x2, double t1, double t2) {
  if (N < 1) throw std::invalid_argument("scaling_map: N must be positive");
  if (!(alpha > 0.0)) throw std::invalid_argument("scaling_map: alpha must be positive");
  detail::check_gamma(gamma);
  const double Nd = N;
  const double c = std::pow(1.0 + std::sqrt(alpha), 2.0 / 3.0);
  const double n23 = std::pow(Nd, 2.0 / 3.0);
  ScaledPoint sp;
  sp.params.N = N;
  sp.params.M = static_cast<int>(std::floor(alpha * Nd));
  sp.params.m = static_cast<int>(std::floor(gamma * alpha * Nd + x1 * std::pow(alpha, 2.0 / 3.0) * c * n23));
  sp.params.n = static_cast<int>(std::floor(gamma * Nd + x2 * std::pow(alpha, -1.0 / 3.0) * c * n23));
  sp.params.direction = Direction::Right;
  const int m = sp.params.m, n = sp.params.n, M = sp.params.M;
  if (!(m >= 1 && m <= M - 1 && n >= 1 && n <= N))
    throw std::out_of_range("scaling_map: scaled indices fall outside the grid");
  const double tscale = std::pow(alpha, -1.0 / 6.0) * c * c * std::cbrt(Nd);
  sp.t1 = expected_distance({1, 1}, {m, n}) + t1 * tscale;
  sp.t2 = expected_distance({m + 1, n}, {M, N}) + t2 * tscale;
  sp.t2_up = n < N ? expected_distance({m, n + 1}, {M, N}) + t2 * tscale : sp.t2;
  sp.x = x2 - x1;
  return sp;
}

}  // namespace lpp
