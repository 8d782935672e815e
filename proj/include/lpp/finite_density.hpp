#pragma once

// Exact finite-time joint density of the geodesic location and the two
// passage times, in three equivalent representations: the nested contour
// series, a determinant formula over two circles, and a Cauchy-type formula
// over nested circles enclosing 0 and -1.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpp/contour.hpp"
#include "lpp/multilinear.hpp"
#include "lpp/parallel.hpp"
#include "lpp/report.hpp"
#include "lpp/series_engine.hpp"

namespace lpp {

/** Which neighbour r' of r = (m, n) the geodesic steps to. */
enum class Direction { Right, Up };

/** Lattice parameters: r = (m, n) on the grid ending at (M, N). */
struct FiniteParams {
  int m = 1;
  int n = 1;
  int M = 2;
  int N = 1;
  Direction direction = Direction::Right;

  void validate() const {
    if (M < 1 || N < 1) throw std::invalid_argument("FiniteParams: M and N must be positive");
    if (direction == Direction::Right) {
      if (m < 1 || m > M - 1) throw std::invalid_argument("FiniteParams: need 1 <= m <= M-1 for Right");
      if (n < 1 || n > N) throw std::invalid_argument("FiniteParams: need 1 <= n <= N for Right");
    } else {
      if (n < 1 || n > N - 1) throw std::invalid_argument("FiniteParams: need 1 <= n <= N-1 for Up");
      if (m < 1 || m > M) throw std::invalid_argument("FiniteParams: need 1 <= m <= M for Up");
    }
  }

  /** Parameters of the equivalent Right-step problem (rows and columns exchanged for Up). */
  FiniteParams effective() const {
    validate();
    if (direction == Direction::Right) return *this;
    return FiniteParams{n, m, N, M, Direction::Right};
  }
};

/** Circle radii and node tiers of the finite contour family. */
struct FiniteQuadrature {
  std::array<double, 3> left_radii{0.25, 0.25 / 3.0, 0.25 / 9.0};   ///< (out, mid, in) around -1
  std::array<double, 3> right_radii{0.25, 0.25 / 3.0, 0.25 / 9.0};  ///< (out, mid, in) around 0
  int nodes_low = 32;   ///< nodes per circle for terms with k1+k2 <= 3
  int nodes_high = 12;  ///< nodes per circle for terms with k1+k2 >= 4
  double z_radius = 0.5;
  int z_nodes = 64;

  int nodes_for(int k1, int k2) const { return (k1 + k2 <= 3) ? nodes_low : nodes_high; }

  void validate() const {
    for (const auto* r : {&left_radii, &right_radii}) {
      if (!((*r)[0] > (*r)[1] && (*r)[1] > (*r)[2] && (*r)[2] > 0.0))
        throw std::invalid_argument("FiniteQuadrature: radii must satisfy out > mid > in > 0");
      if (!((*r)[0] < 1.0)) throw std::invalid_argument("FiniteQuadrature: radii must stay below 1");
    }
    // Rightmost point of the left family must lie left of the leftmost point of the right family.
    if (!(-1.0 + left_radii[0] < -right_radii[0]))
      throw std::invalid_argument("FiniteQuadrature: contour-order violation, need max Re(left) < min Re(right)");
    if (!(z_radius > 0.0 && z_radius < 1.0)) throw std::invalid_argument("FiniteQuadrature: z radius must lie in (0,1)");
    if (nodes_low < 4 || nodes_high < 4) throw std::invalid_argument("FiniteQuadrature: too few nodes");
  }
};

/** Truncation and quadrature settings for the series. */
struct SeriesConfig {
  int kmax = 0;  ///< 0 selects N
  FiniteQuadrature quad;
};

/** f1 = (w+1)^(-m) w^n e^(sw) for level 1, f2 = (w+1)^(-M+m) w^(N-n) e^(sw) for level 2. */
inline cplx f_weight(int level, cplx w, double s, const FiniteParams& p) {
  int a, b;  // exponents of (w+1) and w
  if (level == 1) {
    a = -p.m;
    b = p.n;
  } else if (level == 2) {
    a = -p.M + p.m;
    b = p.N - p.n;
  } else {
    throw std::invalid_argument("f_weight: level must be 1 or 2");
  }
  if ((a < 0 && w == cplx(-1.0)) || (b < 0 && w == cplx(0.0)))
    throw std::domain_error("f_weight: evaluation at a pole");
  return ipow(w + 1.0, a) * ipow(w, b) * std::exp(s * w);
}

/** The coupling factor of the series integrand for explicit vectors. */
inline cplx big_H(const std::vector<cplx>& U1, const std::vector<cplx>& U2, const std::vector<cplx>& V1,
                  const std::vector<cplx>& V2) {
  if (U1.size() != V1.size() || U2.size() != V2.size())
    throw std::invalid_argument("big_H: U and V sizes must match per level");
  cplx A{0.0}, B{0.0}, P{1.0};
  for (std::size_t i = 0; i < U1.size(); ++i) {
    if (U1[i] == cplx(0.0)) throw std::domain_error("big_H: zero entry in U1");
    A += U1[i] - V1[i];
    B -= U1[i] * U1[i] - V1[i] * V1[i];
    P *= V1[i] / U1[i];
  }
  for (std::size_t i = 0; i < U2.size(); ++i) {
    if (V2[i] == cplx(0.0)) throw std::domain_error("big_H: zero entry in V2");
    A -= U2[i] - V2[i];
    B += U2[i] * U2[i] - V2[i] * V2[i];
    P *= U2[i] / V2[i];
  }
  return 0.5 * A * A * (1.0 + P) + 0.5 * B * (1.0 - P);
}

/** 1/2 (sum w - sum w')^2 - 1/2 (sum w^2 - sum w'^2). */
inline cplx hat_H(const std::vector<cplx>& W, const std::vector<cplx>& Wp) {
  cplx s1{0.0}, s2{0.0};
  for (cplx w : W) {
    s1 += w;
    s2 += w * w;
  }
  for (cplx w : Wp) {
    s1 -= w;
    s2 -= w * w;
  }
  return 0.5 * s1 * s1 - 0.5 * s2;
}

namespace detail {

/** Statistics contributions (A, B, D1, D2 sums and the product P) of one series variable. */
inline Moments finite_moments(int group, cplx x) {
  Moments m;
  switch (group) {
    case GroupU1: m.s = {x, -x * x, x, 0.0, 0.0}; m.p = 1.0 / x; break;
    case GroupV1: m.s = {-x, x * x, -x, 0.0, 0.0}; m.p = x; break;
    case GroupU2: m.s = {-x, x * x, 0.0, x, 0.0}; m.p = x; break;
    default: m.s = {x, -x * x, 0.0, -x, 0.0}; m.p = 1.0 / x; break;
  }
  return m;
}

/** H = A^2 (1+P)/2 + B (1-P)/2, divided by D1 D2 for the tail. */
template <bool Tail>
struct FiniteFinish {
  static constexpr int additive_channels = Tail ? 4 : 2;
  static constexpr bool uses_product = true;
  void operator()(const Channels& c, double& hr, double& hi) const {
    const double Ar = c.r[0], Ai = c.i[0], Br = c.r[1], Bi = c.i[1];
    const double Pr = c.r[kProductChannel], Pi = c.i[kProductChannel];
    const double A2r = Ar * Ar - Ai * Ai, A2i = 2.0 * Ar * Ai;
    const double ur = 1.0 + Pr, vr = 1.0 - Pr;
    hr = 0.5 * (A2r * ur - A2i * Pi + Br * vr + Bi * Pi);
    hi = 0.5 * (A2r * Pi + A2i * ur + Bi * vr - Br * Pi);
    if constexpr (Tail) {
      const double qr = c.r[2] * c.r[3] - c.i[2] * c.i[3];
      const double qi = c.r[2] * c.i[3] + c.i[2] * c.r[3];
      const double inv = 1.0 / (qr * qr + qi * qi);
      const double tr = (hr * qr + hi * qi) * inv;
      hi = (hi * qr - hr * qi) * inv;
      hr = tr;
    }
  }
};

/** Node data of the four variable groups on the finite contour family. */
inline std::array<GroupNodes, 4> finite_groups(const FiniteParams& p, double s1, double s2,
                                               const FiniteQuadrature& q, int nodes) {
  const Contour Lout = circle(-1.0, q.left_radii[0], nodes);
  const Contour Lmid = circle(-1.0, q.left_radii[1], nodes);
  const Contour Lin = circle(-1.0, q.left_radii[2], nodes);
  const Contour Rout = circle(0.0, q.right_radii[0], nodes);
  const Contour Rmid = circle(0.0, q.right_radii[1], nodes);
  const Contour Rin = circle(0.0, q.right_radii[2], nodes);
  std::array<GroupNodes, 4> g;
  auto add = [&](int group, const Contour& c, bool outer, auto&& single) {
    for (std::size_t k = 0; k < c.size(); ++k)
      g[group].push(c.nodes[k], c.weights[k] * single(c.nodes[k]), outer, finite_moments(group, c.nodes[k]));
  };
  auto f1u = [&](cplx w) { return f_weight(1, w, s1, p); };
  auto f1v = [&](cplx w) { return 1.0 / f_weight(1, w, s1, p); };
  auto f2u = [&](cplx w) { return f_weight(2, w, s2, p); };
  auto f2v = [&](cplx w) { return 1.0 / f_weight(2, w, s2, p); };
  add(GroupU1, Lin, false, f1u);
  add(GroupU1, Lout, true, f1u);
  add(GroupV1, Rin, false, f1v);
  add(GroupV1, Rout, true, f1v);
  add(GroupU2, Lmid, false, f2u);
  add(GroupV2, Rmid, false, f2v);
  return g;
}

inline double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

/** Set-sum coefficients of one finite series term. */
inline SeriesCoefficients finite_coefficients(int k1, int k2, double s1, double s2, const FiniteParams& p,
                                              const FiniteQuadrature& q, int nodes, bool tail, int jmax) {
  const auto g = finite_groups(p, s1, s2, q, nodes);
  if (tail) return series_coefficients(k1, k2, {&g[0], &g[1], &g[2], &g[3]}, jmax, FiniteFinish<true>{});
  return series_coefficients(k1, k2, {&g[0], &g[1], &g[2], &g[3]}, jmax, FiniteFinish<false>{});
}

/** z-integrated contribution of one term given its set-sum coefficients. */
inline cplx z_integrated(int k1, int k2, const std::vector<cplx>& c, double z_radius, int z_nodes) {
  cplx total{0.0};
  for (std::size_t j = 0; j < c.size(); ++j)
    total += c[j] * z_kernel_trapezoid(k1, k2, static_cast<int>(j), z_radius, z_nodes);
  return total;
}

/** Sum of the z-integrated series terms for a density (tail = false) or a tail probability. */
inline EstimateReport finite_series(const std::string& quantity, double a1, double a2, const FiniteParams& params,
                                    const SeriesConfig& config, bool tail) {
  Stopwatch clock;
  const FiniteParams p = params.effective();
  config.quad.validate();
  const int kmax = config.kmax > 0 ? config.kmax : p.N;
  EstimateReport rep;
  rep.quantity = quantity;
  for (int k1 = 1; k1 <= kmax; ++k1) {
    for (int k2 = 1; k2 <= kmax; ++k2) {
      Stopwatch term_clock;
      const int nodes = config.quad.nodes_for(k1, k2);
      const auto coeff = finite_coefficients(k1, k2, a1, a2, p, config.quad, nodes, tail, z_kernel_jmax(k1));
      TermRecord t;
      t.k1 = k1;
      t.k2 = k2;
      t.value = z_integrated(k1, k2, coeff.c, config.quad.z_radius, config.quad.z_nodes);
      t.max_abs = coeff.max_abs;
      t.nodes = nodes;
      t.runtime_ms = term_clock.ms();
      rep.value += t.value;
      rep.terms.push_back(t);
    }
  }
  rep.error_estimate = rep.imag_residue();
  rep.runtime_ms = clock.ms();
  return rep;
}

}  // namespace detail

/**
 * One series term T_{k1,k2}(z) of the density at a point z of the z-circle,
 * as the full tensor integral over ordered variable tuples.
 */
inline cplx term_T(int k1, int k2, cplx z, double s1, double s2, const FiniteParams& params,
                   const FiniteQuadrature& quad, int nodes = 0) {
  if (k1 < 1 || k2 < 1) throw std::invalid_argument("term_T: k1, k2 must be at least 1");
  quad.validate();
  const FiniteParams p = params.effective();
  const int n = nodes > 0 ? nodes : quad.nodes_for(k1, k2);
  const auto coeff = detail::finite_coefficients(k1, k2, s1, s2, p, quad, n, false, 2 * k1);
  cplx poly{0.0};
  for (int j = 2 * k1; j >= 0; --j) poly = poly * (-z) + coeff.c[j];
  const double perms = detail::factorial(k1) * detail::factorial(k2);
  return perms * perms * ipow(1.0 - z, k2 - 2 * k1) * ipow(1.0 - 1.0 / z, k1) * poly;
}

/** Same as term_T with the s-integrals over [t1, inf) x [t2, inf) carried out. */
inline cplx term_hat_T(int k1, int k2, cplx z, double t1, double t2, const FiniteParams& params,
                       const FiniteQuadrature& quad, int nodes = 0) {
  if (k1 < 1 || k2 < 1) throw std::invalid_argument("term_hat_T: k1, k2 must be at least 1");
  quad.validate();
  const FiniteParams p = params.effective();
  const int n = nodes > 0 ? nodes : quad.nodes_for(k1, k2);
  const auto coeff = detail::finite_coefficients(k1, k2, t1, t2, p, quad, n, true, 2 * k1);
  cplx poly{0.0};
  for (int j = 2 * k1; j >= 0; --j) poly = poly * (-z) + coeff.c[j];
  const double perms = detail::factorial(k1) * detail::factorial(k2);
  return perms * perms * ipow(1.0 - z, k2 - 2 * k1) * ipow(1.0 - 1.0 / z, k1) * poly;
}

/**
 * z-integrated contribution of term (k1, k2) divided by (k1! k2!)^2, i.e. the
 * amount this term adds to the density (or to the tail when `tail` is set).
 */
inline TermRecord term_contribution(int k1, int k2, double a1, double a2, const FiniteParams& params,
                                    const FiniteQuadrature& quad, bool tail, int nodes = 0) {
  quad.validate();
  Stopwatch clock;
  const FiniteParams p = params.effective();
  const int n = nodes > 0 ? nodes : quad.nodes_for(k1, k2);
  const auto coeff = detail::finite_coefficients(k1, k2, a1, a2, p, quad, n, tail, z_kernel_jmax(k1));
  TermRecord t;
  t.k1 = k1;
  t.k2 = k2;
  t.value = detail::z_integrated(k1, k2, coeff.c, quad.z_radius, quad.z_nodes);
  t.max_abs = coeff.max_abs;
  t.nodes = n;
  t.runtime_ms = clock.ms();
  return t;
}

/** Joint density p(s1, s2; m, n, M, N) from the truncated series. */
inline EstimateReport density(double s1, double s2, const FiniteParams& params, const SeriesConfig& config = {}) {
  if (s1 < 0.0 || s2 < 0.0) throw std::invalid_argument("density: s1 and s2 must be nonnegative");
  return detail::finite_series("finite_density", s1, s2, params, config, false);
}

/** P(r, r' on the geodesic, L(1,1 -> r) >= t1, L(r' -> M,N) >= t2). */
inline EstimateReport tail_joint(double t1, double t2, const FiniteParams& params, const SeriesConfig& config = {}) {
  return detail::finite_series("tail_joint", t1, t2, params, config, true);
}

/** P(r, r' on the geodesic). */
inline EstimateReport geodesic_prob(const FiniteParams& params, const SeriesConfig& config = {}) {
  return detail::finite_series("geodesic_prob", 0.0, 0.0, params, config, true);
}

/** Quadrature settings of the determinant formula over |w| = R1 and |w| = R2. */
struct Formula01Config {
  double R1 = 2.5;
  double R2 = 1.6;
  int nodes = 64;
  double z_radius = 0.5;
  int z_nodes = 8;
};

namespace detail {

/** Visits every strictly increasing k-subset of {0, ..., n-1}. */
template <class F>
void for_each_subset(std::size_t n, std::size_t k, F&& visit) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  for (;;) {
    visit(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

/** All strictly increasing k-subsets of {0, ..., n-1}, listed in lexicographic order. */
inline std::vector<std::vector<std::size_t>> all_subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  for_each_subset(n, k, [&](const std::vector<std::size_t>& s) { out.push_back(s); });
  return out;
}

}  // namespace detail

/** Density from the determinant formula with the (N-1) x (N-1) minors of C_z + D_z. */
inline cplx formula01(double s1, double s2, const FiniteParams& params, const Formula01Config& cfg = {}) {
  if (!(cfg.R1 > cfg.R2 && cfg.R2 > 1.0)) throw std::invalid_argument("formula01: need R1 > R2 > 1");
  const FiniteParams p = params.effective();
  const int N = p.N, n = p.n, m = p.m, M = p.M;
  const Contour c1 = circle(0.0, cfg.R1, cfg.nodes);
  const Contour c2 = circle(0.0, cfg.R2, cfg.nodes);
  const Contour cz = circle(0.0, cfg.z_radius, cfg.z_nodes);
  const std::size_t n1 = c1.size(), n2 = c2.size();

  std::vector<cplx> f1(n1), G1(n1), f2(n2), G2(n2);
  std::vector<cplx> X(n1 * n2), Y(n1 * n2);
  auto A = [&](cplx w) { return ipow(w, n - 1) * std::exp(s1 * w); };
  auto B = [&](cplx w) { return ipow(w, n + 1) * std::exp(s1 * w); };
  auto E = [&](cplx w) { return ipow(w, N) * std::exp((s1 + s2) * w); };
  for (std::size_t i = 0; i < n1; ++i) {
    const cplx w = c1.nodes[i];
    f1[i] = c1.weights[i] * ipow(w, -N) * ipow(w + 1.0, -m);
    G1[i] = ipow(w, n) * std::exp(s1 * w);
  }
  for (std::size_t j = 0; j < n2; ++j) {
    const cplx w = c2.nodes[j];
    f2[j] = c2.weights[j] * ipow(w + 1.0, -M + m) * std::exp((s1 + s2) * w);
    G2[j] = 1.0 / A(w);
  }
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j) {
      const cplx a = c1.nodes[i], b = c2.nodes[j];
      X[i * n2 + j] = (A(a) / A(b) - a / b) / (a - b);
      Y[i * n2 + j] = (E(a) / E(b) - B(a) / B(b)) / (a - b);
    }
  std::vector<cplx> zpow(cz.size());
  for (std::size_t k = 0; k < cz.size(); ++k) zpow[k] = cz.weights[k] * ipow(cz.nodes[k], -n);

  const auto sets1 = detail::all_subsets(n1, N);
  const auto sets2 = detail::all_subsets(n2, N);
  std::vector<cplx> partial(sets1.size());
  parallel_for(sets1.size(), [&](std::size_t a) {
    const auto& I = sets1[a];
    std::vector<cplx> w1(N);
    cplx pre1{1.0};
    for (int i = 0; i < N; ++i) {
      w1[i] = c1.nodes[I[i]];
      pre1 *= f1[I[i]];
    }
    pre1 *= delta(w1);
    cplx sum{0.0};
    std::vector<cplx> w2(N);
    // sum over (l1, l2) of (-1)^(l1+l2) G1 G2 minor(l1, l2) equals minus the bordered determinant.
    Matrix<cplx> border(N + 1);
    for (const auto& J : sets2) {
      cplx pre = pre1;
      for (int i = 0; i < N; ++i) {
        w2[i] = c2.nodes[J[i]];
        pre *= f2[J[i]];
      }
      pre *= delta(w2);
      cplx zsum{0.0};
      for (std::size_t k = 0; k < cz.size(); ++k) {
        const cplx z = cz.nodes[k];
        for (int r = 0; r < N; ++r) {
          for (int c = 0; c < N; ++c) border(r, c) = z * X[I[r] * n2 + J[c]] + Y[I[r] * n2 + J[c]];
          border(r, N) = G1[I[r]];
          border(N, r) = G2[J[r]];
        }
        border(N, N) = 0.0;
        const cplx S = -determinant_in_place(border);
        zsum += zpow[k] * S;
      }
      sum += pre * zsum;
    }
    partial[a] = sum;
  });
  cplx total{0.0};
  for (const cplx& v : partial) total += v;
  const double sign = ((N * (N - 1) / 2) % 2 == 0) ? 1.0 : -1.0;
  // Ordered tuples contribute (N!)^2 times the set sum, which cancels the 1/(N!)^2 prefactor.
  return sign * total;
}

/** Quadrature settings of the Cauchy-type formula over circles centred at -1/2. */
struct Formula02Config {
  cplx center{-0.5};
  double r_in = 0.8;
  double r_mid = 1.3;
  double r_out = 2.1;
  int nodes = 64;
  double z_radius = 0.5;
  int z_nodes = 64;
};

/** Density from the Cauchy-type formula with weighted inner/outer alternatives on W1. */
inline cplx formula02(double s1, double s2, const FiniteParams& params, const Formula02Config& cfg = {}) {
  if (!(cfg.r_out > cfg.r_mid && cfg.r_mid > cfg.r_in))
    throw std::invalid_argument("formula02: nesting violation, need r_out > r_mid > r_in");
  if (!(std::abs(cfg.center) < cfg.r_in && std::abs(cfg.center + 1.0) < cfg.r_in))
    throw std::invalid_argument("formula02: contours must enclose 0 and -1");
  const FiniteParams p = params.effective();
  const int N = p.N, n = p.n, m = p.m, M = p.M;
  const Contour cin = circle(cfg.center, cfg.r_in, cfg.nodes);
  const Contour cout = circle(cfg.center, cfg.r_out, cfg.nodes);
  const Contour cmid = circle(cfg.center, cfg.r_mid, cfg.nodes);

  // W1 runs over the union of the inner and outer circles.
  std::vector<cplx> x1, f1;
  std::vector<int> outer;
  for (const auto* c : {&cin, &cout}) {
    for (std::size_t k = 0; k < c->size(); ++k) {
      const cplx w = c->nodes[k];
      x1.push_back(w);
      f1.push_back(c->weights[k] * ipow(w + 1.0, -m) * ipow(w, -N + n) * std::exp(s1 * w));
      outer.push_back(c == &cout ? 1 : 0);
    }
  }
  std::vector<cplx> x2(cmid.size()), f2(cmid.size());
  for (std::size_t k = 0; k < cmid.size(); ++k) {
    const cplx w = cmid.nodes[k];
    x2[k] = w;
    f2[k] = cmid.weights[k] * ipow(w + 1.0, -M + m) * ipow(w, -n) * std::exp(s2 * w);
  }

  const auto sets1 = detail::all_subsets(x1.size(), N);
  const auto sets2 = detail::all_subsets(x2.size(), N);
  // c[e][j]: coefficient of z^e (-z)^j with j outer nodes, e in {0, 1}.
  std::vector<std::array<std::vector<cplx>, 2>> partial(sets1.size());
  parallel_for(sets1.size(), [&](std::size_t a) {
    const auto& I = sets1[a];
    std::array<std::vector<cplx>, 2> acc{std::vector<cplx>(N + 1), std::vector<cplx>(N + 1)};
    std::vector<cplx> W1(N), W2(N);
    cplx pre1{1.0}, prod1{1.0};
    int j = 0;
    for (int i = 0; i < N; ++i) {
      W1[i] = x1[I[i]];
      pre1 *= f1[I[i]];
      prod1 *= W1[i];
      j += outer[I[i]];
    }
    const cplx d1 = delta(W1);
    pre1 *= d1 * d1;
    for (const auto& J : sets2) {
      cplx pre = pre1, prod2{1.0};
      for (int i = 0; i < N; ++i) {
        W2[i] = x2[J[i]];
        pre *= f2[J[i]];
        prod2 *= W2[i];
      }
      const cplx d2 = delta(W2);
      pre *= d2 * d2 / delta_cross(W2, W1);
      acc[0][j] += pre * hat_H(W1, W2);
      acc[1][j] += pre * (prod2 / prod1) * hat_H(W2, W1);
    }
    partial[a] = std::move(acc);
  });
  std::array<std::vector<cplx>, 2> c{std::vector<cplx>(N + 1), std::vector<cplx>(N + 1)};
  for (const auto& pa : partial)
    for (int e = 0; e < 2; ++e)
      for (int j = 0; j <= N; ++j) c[e][j] += pa[e][j];

  const Contour cz = circle(0.0, cfg.z_radius, cfg.z_nodes);
  cplx total{0.0};
  for (std::size_t k = 0; k < cz.size(); ++k) {
    const cplx z = cz.nodes[k];
    const cplx base = cz.weights[k] * ipow(1.0 - z, -2) * ipow(z, -n);
    cplx poly{0.0};
    for (int j = 0; j <= N; ++j) poly += (c[0][j] + z * c[1][j]) * ipow(-z, j);
    total += base * poly;
  }
  return total;
}

}  // namespace lpp
