#pragma once

// Numerical checks of the algebraic identities behind the finite-time
// formula. Each identity has a brute-force side (finite sums, minor
// expansions, contour integrals) and a closed side.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lpp/contour.hpp"
#include "lpp/finite_density.hpp"
#include "lpp/multilinear.hpp"
#include "lpp/parallel.hpp"
#include "lpp/rng.hpp"

namespace lpp {

using CVec = std::vector<cplx>;

/** Relative difference |a - b| / max(|a|, |b|), or the absolute difference when both vanish. */
inline double rel_diff(cplx a, cplx b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

namespace detail {

inline void require_sorted(const std::vector<int>& X, const char* who) {
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (X[i] < 0) throw std::invalid_argument(std::string(who) + ": entries must be nonnegative");
    if (i > 0 && X[i] < X[i - 1]) throw std::invalid_argument(std::string(who) + ": entries must be nondecreasing");
  }
}

inline void require_disjoint(const CVec& X, const CVec& Y, const char* who) {
  for (cplx x : X)
    for (cplx y : Y)
      if (x == y) throw std::domain_error(std::string(who) + ": collision between the two vectors");
}

inline void require_nonzero(const CVec& X, const char* who) {
  for (cplx x : X)
    if (x == cplx(0.0)) throw std::domain_error(std::string(who) + ": zero entry");
}

/**
 * Calls visit(tuple) for every nondecreasing integer tuple with
 * lo[j] <= t[j] <= hi[j] and t[j] >= t[j-1].
 */
template <class Visit>
void for_each_monotone(const std::vector<int>& lo, const std::vector<int>& hi, Visit&& visit) {
  const std::size_t k = lo.size();
  std::vector<int> t(k);
  std::function<void(std::size_t, int)> rec = [&](std::size_t j, int floor) {
    if (j == k) {
      visit(t);
      return;
    }
    for (int v = std::max(lo[j], floor); v <= hi[j]; ++v) {
      t[j] = v;
      rec(j + 1, v);
    }
  };
  rec(0, 0);
}

/** Coefficient of z^p in the polynomial of degree < K sampled by eval on a circle. */
template <class Eval>
cplx z_coefficient(Eval&& eval, int p, int K, double radius) {
  cplx sum{0.0};
  for (int k = 0; k < K; ++k) {
    const cplx z = std::polar(radius, 2.0 * pi * k / K);
    sum += eval(z) * ipow(z, -p);
  }
  return sum / static_cast<double>(K);
}

}  // namespace detail

/** Integral over |w| = R of (w+1)^{x_j+m-1} w^{j-i} / (w+1-q)^m, matrix det times (1-q)^{mN}. */
inline double johansson_transition(const std::vector<int>& X, int m, double q, double R, int nodes = 256) {
  detail::require_sorted(X, "johansson_transition");
  if (X.empty()) throw std::invalid_argument("johansson_transition: X must be nonempty");
  if (m < 1) throw std::invalid_argument("johansson_transition: m must be positive");
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("johansson_transition: q must lie in (0,1)");
  if (!(R > 1.0)) throw std::invalid_argument("johansson_transition: R must exceed 1");
  const std::size_t N = X.size();
  const Contour c = circle(0.0, R, nodes);
  Matrix<cplx> A(N);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      const int e = static_cast<int>(j) - static_cast<int>(i);
      A(i, j) = std::pow(1.0 - q, m) * integrate([&](cplx w) {
                  return ipow(w + 1.0, X[j] + m - 1) * ipow(w, e) / ipow(w + 1.0 - q, m);
                }, c);
    }
  return determinant(A).real();
}

/** Matrix entry C_z + D_z written as z * a + b. */
struct CDEntry {
  cplx a, b;
};

inline CDEntry cd_entry(cplx w1, cplx w2, int x, int y, int n, int N) {
  const cplx d = w1 - w2;
  CDEntry e;
  e.a = ipow(w1, n - 1) * ipow(w1 + 1.0, x + 1) / (ipow(w2, n - 1) * ipow(w2 + 1.0, x)) / d -
        w1 * (w2 + 1.0) / w2 / d;
  e.b = -ipow(w1, n + 1) * ipow(w1 + 1.0, x) / (ipow(w2, n + 1) * ipow(w2 + 1.0, x - 1)) / d +
        ipow(w1, N) * ipow(w1 + 1.0, x + y + 1) / (ipow(w2, N) * ipow(w2 + 1.0, x + y)) / d;
  return e;
}

/**
 * Closed form of the sum over X of the two determinants: the l1, l2 sum of
 * ratio factors times the z^{n-1} coefficient of det[C_z + D_z] minors.
 */
inline cplx sw_closed(const CVec& W1, const CVec& W2, int x, int y, int n, double z_radius = 0.5) {
  const int N = static_cast<int>(W1.size());
  if (N < 1 || W2.size() != W1.size()) throw std::invalid_argument("sw_closed: W1 and W2 must have equal positive size");
  if (x < 0 || y < 0 || n < 1 || n > N) throw std::invalid_argument("sw_closed: need x, y >= 0 and 1 <= n <= N");
  if (!(z_radius > 0.0)) throw std::invalid_argument("sw_closed: z radius must be positive");
  detail::require_disjoint(W1, W2, "sw_closed");
  detail::require_nonzero(W2, "sw_closed");
  std::vector<CDEntry> E(static_cast<std::size_t>(N * N));
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) E[static_cast<std::size_t>(i * N + j)] = cd_entry(W1[i], W2[j], x, y, n, N);
  const int K = std::max(N, 2);
  cplx total{0.0};
  for (int l1 = 0; l1 < N; ++l1)
    for (int l2 = 0; l2 < N; ++l2) {
      const cplx ratio = ipow(W1[l1] + 1.0, x) * ipow(W1[l1], n) / (ipow(W2[l2] + 1.0, x + 1) * ipow(W2[l2], n - 1));
      const cplx coeff = detail::z_coefficient([&](cplx z) {
        Matrix<cplx> A(static_cast<std::size_t>(N - 1));
        for (int i = 0, ii = 0; i < N; ++i) {
          if (i == l1) continue;
          for (int j = 0, jj = 0; j < N; ++j) {
            if (j == l2) continue;
            const CDEntry& e = E[static_cast<std::size_t>(i * N + j)];
            A(ii, jj++) = z * e.a + e.b;
          }
          ++ii;
        }
        return determinant(A);
      }, n - 1, K, z_radius);
      total += ((l1 + l2) % 2 == 0 ? 1.0 : -1.0) * ratio * coeff;
    }
  return total;
}

/** Direct sum over 0 <= x_1 <= ... <= x_N <= x+y with x_n = x of the two determinants. */
inline cplx sw_direct(const CVec& W1, const CVec& W2, int x, int y, int n) {
  const int N = static_cast<int>(W1.size());
  if (N < 1 || W2.size() != W1.size()) throw std::invalid_argument("sw_direct: W1 and W2 must have equal positive size");
  if (x < 0 || y < 0 || n < 1 || n > N) throw std::invalid_argument("sw_direct: need x, y >= 0 and 1 <= n <= N");
  detail::require_nonzero(W2, "sw_direct");
  std::vector<int> lo(N, 0), hi(N, x + y);
  lo[n - 1] = hi[n - 1] = x;
  cplx total{0.0};
  detail::for_each_monotone(lo, hi, [&](const std::vector<int>& X) {
    Matrix<cplx> A(N), B(N);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        const int one = (j == n - 1) ? 1 : 0;
        A(i, j) = ipow(W1[i] + 1.0, X[j]) * ipow(W1[i], j + 1);
        B(i, j) = ipow(W2[i] + 1.0, -X[j] - one) * ipow(W2[i], -(j + 1) + one);
      }
    total += determinant(A) * determinant(B);
  });
  return total;
}

/** Contour settings for the event-A probability. */
struct ProbAQuadrature {
  int nodes = 32;         ///< trapezoid nodes on each w circle
  double z_radius = 0.5;  ///< radius of the z circle
};

/**
 * Probability of event A for geometric weights from its (2N+1)-fold contour
 * integral over |w^(1)| = R1, |w^(2)| = R2 and a small z circle.
 */
inline double probability_A(int x, int y, int m, int n, int M, int N, double q, double R1, double R2,
                            const ProbAQuadrature& quad = {}) {
  if (x < 0 || y < 0) throw std::invalid_argument("probability_A: x and y must be nonnegative");
  if (!(R1 > 1.0 && R2 > 1.0) || R1 == R2) throw std::invalid_argument("probability_A: radii must be distinct and larger than 1");
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("probability_A: q must lie in (0,1)");
  if (!(m >= 1 && m <= M - 1 && n >= 1 && n <= N)) throw std::invalid_argument("probability_A: need 1 <= m <= M-1, 1 <= n <= N");
  std::vector<Contour> cs;
  for (int i = 0; i < N; ++i) cs.push_back(circle(0.0, R1, quad.nodes));
  for (int i = 0; i < N; ++i) cs.push_back(circle(0.0, R2, quad.nodes));
  auto F1 = [&](cplx w) { return ipow(w + 1.0, m - 1) * ipow(w, -N) * ipow(w + 1.0 - q, -m); };
  auto F2 = [&](cplx w) { return ipow(w + 1.0, x + y + M - m) * ipow(w + 1.0 - q, -M + m); };
  const cplx integral = tensor_integrate([&](const std::vector<cplx>& pts) {
    CVec W1(pts.begin(), pts.begin() + N), W2(pts.begin() + N, pts.end());
    return delta(W1) * delta(W2) * prod_apply(F1, W1) * prod_apply(F2, W2) * sw_closed(W1, W2, x, y, n, quad.z_radius);
  }, cs);
  double fact = 1.0;
  for (int k = 2; k <= N; ++k) fact *= k;
  const double sign = ((N * (N - 1) / 2) % 2 == 0) ? 1.0 : -1.0;
  return sign * std::pow(1.0 - q, M * N) / (fact * fact) * integral.real();
}

/** Parameters of the summation over Y: X with x_n = x, and the circle radius. */
struct SumYParams {
  std::vector<int> X;  ///< 0 <= x_1 <= ... <= x_N <= x + y
  int x = 0;
  int y = 0;
  int n = 1;
  double radius = 1.5;
  int nodes = 256;
};

/** Nested sum of determinants over y (lhs) against the single determinant (rhs). */
inline std::pair<cplx, cplx> sum_y_check(const SumYParams& p, const std::function<cplx(cplx)>& F) {
  const int N = static_cast<int>(p.X.size());
  detail::require_sorted(p.X, "sum_y_check");
  if (N < 1 || p.n < 1 || p.n > N) throw std::invalid_argument("sum_y_check: need 1 <= n <= N");
  if (p.X[p.n - 1] != p.x) throw std::invalid_argument("sum_y_check: x_n must equal x");
  if (p.X.back() > p.x + p.y) throw std::invalid_argument("sum_y_check: x_N must not exceed x + y");
  const Contour c = circle(0.0, p.radius, p.nodes);
  std::vector<cplx> Fv(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) Fv[k] = F(c.nodes[k]);
  auto entry = [&](int a, int b) {
    cplx s{0.0};
    for (std::size_t k = 0; k < c.size(); ++k) s += c.weights[k] * ipow(c.nodes[k] + 1.0, a) * ipow(c.nodes[k], b) * Fv[k];
    return s;
  };
  const int T = p.x + p.y;
  // The y sums run downward from j = N; reversing indices turns them into a
  // nondecreasing tuple u_k = y_{N+1-k}.
  std::vector<int> lo(N), hi(N);
  for (int k = 0; k < N; ++k) {
    const int j = N - k;  // 1-based index of y_j
    lo[k] = 0;
    hi[k] = T - p.X[j - 1];
    if (j == p.n) lo[k] = hi[k] = p.y;
  }
  cplx lhs{0.0};
  detail::for_each_monotone(lo, hi, [&](const std::vector<int>& u) {
    Matrix<cplx> A(N);
    for (int i = 1; i <= N; ++i)
      for (int j = 1; j <= N; ++j) A(i - 1, j - 1) = entry(u[N - j], -j + i);
    lhs += determinant(A);
  });
  Matrix<cplx> B(N);
  for (int i = 1; i <= N; ++i)
    for (int j = 1; j <= N; ++j) {
      const int one = (j != p.n) ? 1 : 0;
      B(i - 1, j - 1) = entry(T - p.X[j - 1] + one, -j + i - one);
    }
  return {lhs, determinant(B)};
}

/** Direct sum over a <= x_1 <= ... <= x_k <= b of the two determinants. */
inline cplx sab_direct(const CVec& W, const CVec& Wp, int a, int b) {
  const int k = static_cast<int>(W.size());
  if (k < 1 || Wp.size() != W.size()) throw std::invalid_argument("sab_direct: W and W' must have equal positive size");
  if (a > b) throw std::invalid_argument("sab_direct: need a <= b");
  detail::require_disjoint(W, Wp, "sab_direct");
  detail::require_nonzero(Wp, "sab_direct");
  cplx total{0.0};
  detail::for_each_monotone(std::vector<int>(k, a), std::vector<int>(k, b), [&](const std::vector<int>& X) {
    Matrix<cplx> A(k), B(k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        A(i, j) = ipow(W[i] + 1.0, X[j]) * ipow(W[i], j + 1);
        B(i, j) = ipow(Wp[i] + 1.0, -X[j]) * ipow(Wp[i], -(j + 1));
      }
    total += determinant(A) * determinant(B);
  });
  return total;
}

/** Single k x k determinant equal to the sum over a <= x_1 <= ... <= x_k <= b. */
inline cplx sab_det(const CVec& W, const CVec& Wp, int a, int b) {
  const int k = static_cast<int>(W.size());
  if (k < 1 || Wp.size() != W.size()) throw std::invalid_argument("sab_det: W and W' must have equal positive size");
  if (a > b) throw std::invalid_argument("sab_det: need a <= b");
  detail::require_disjoint(W, Wp, "sab_det");
  detail::require_nonzero(Wp, "sab_det");
  Matrix<cplx> A(k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      const cplx w = W[i], v = Wp[j];
      A(i, j) = w * ipow(w + 1.0, a) / (v * ipow(v + 1.0, a - 1)) / (v - w) +
                ipow(w, k) * ipow(w + 1.0, b + 1) / (ipow(v, k) * ipow(v + 1.0, b)) / (w - v);
    }
  return determinant(A);
}

/** Double sum of minors (lhs) against the closed form with the Cauchy determinant (rhs). */
inline std::pair<cplx, cplx> cauchy_gen_check(const CVec& X, const CVec& Y, cplx z) {
  const int N = static_cast<int>(X.size());
  if (N < 1 || Y.size() != X.size()) throw std::invalid_argument("cauchy_gen_check: X and Y must have equal positive size");
  detail::require_disjoint(X, Y, "cauchy_gen_check");
  detail::require_nonzero(X, "cauchy_gen_check");
  detail::require_nonzero(Y, "cauchy_gen_check");
  Matrix<cplx> E(N), C(N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      E(i, j) = z / (X[i] - Y[j]) * Y[j] / X[i] + X[i] / Y[j] / (Y[j] - X[i]);
      C(i, j) = 1.0 / (Y[j] - X[i]);
    }
  cplx lhs{0.0};
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      lhs += ((a + b) % 2 == 0 ? 1.0 : -1.0) * Y[b] * determinant(E.minor(a, b));
  cplx ratio{1.0};
  for (int i = 0; i < N; ++i) ratio *= Y[i] / X[i];
  const cplx rhs = ipow(1.0 - z, N - 2) * (hat_H(X, Y) + z * ratio * hat_H(Y, X)) * determinant(C);
  return {lhs, rhs};
}

/** The eight tabulated expressions in the C_{p,q} sums. */
enum class CpqRow { C0m1, Cm10, C10, C01, Cm12, Cm11_minus_C00, C02_minus_C11, Cm21 };

inline constexpr CpqRow kAllCpqRows[] = {CpqRow::C0m1, CpqRow::Cm10, CpqRow::C10, CpqRow::C01,
                                         CpqRow::Cm12, CpqRow::Cm11_minus_C00, CpqRow::C02_minus_C11, CpqRow::Cm21};

inline std::string cpq_name(CpqRow r) {
  switch (r) {
    case CpqRow::C0m1: return "C(0,-1)";
    case CpqRow::Cm10: return "C(-1,0)";
    case CpqRow::C10: return "C(1,0)";
    case CpqRow::C01: return "C(0,1)";
    case CpqRow::Cm12: return "C(-1,2)";
    case CpqRow::Cm11_minus_C00: return "C(-1,1)-C(0,0)";
    case CpqRow::C02_minus_C11: return "C(0,2)-C(1,1)";
    case CpqRow::Cm21: return "C(-2,1)";
  }
  return "?";
}

/** Double sum over roots: sum of x_a^p y_b^q Y(x_a) X(y_b) / ((x_a - y_b) X'(x_a) Y'(y_b)). */
inline cplx cpq_direct(const CVec& X, const CVec& Y, int p, int q) {
  const std::size_t N = X.size();
  if (N < 1 || Y.size() != N) throw std::invalid_argument("cpq_direct: X and Y must have equal positive size");
  detail::require_disjoint(X, Y, "cpq_direct");
  if (p < 0) detail::require_nonzero(X, "cpq_direct");
  if (q < 0) detail::require_nonzero(Y, "cpq_direct");
  auto poly = [](const CVec& R, cplx w) {
    cplx v{1.0};
    for (cplx r : R) v *= (w - r);
    return v;
  };
  auto dpoly = [](const CVec& R, std::size_t a) {
    cplx v{1.0};
    for (std::size_t i = 0; i < R.size(); ++i)
      if (i != a) v *= (R[a] - R[i]);
    if (v == cplx(0.0)) throw std::domain_error("cpq_direct: repeated root");
    return v;
  };
  cplx total{0.0};
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = 0; b < N; ++b)
      total += ipow(X[a], p) * ipow(Y[b], q) * poly(Y, X[a]) * poly(X, Y[b]) /
               ((X[a] - Y[b]) * dpoly(X, a) * dpoly(Y, b));
  return total;
}

/** Returns (direct double sum, tabulated closed form) for one row. */
inline std::pair<cplx, cplx> cpq_check(const CVec& X, const CVec& Y, CpqRow row) {
  const std::size_t N = X.size();
  if (N < 1 || Y.size() != N) throw std::invalid_argument("cpq_check: X and Y must have equal positive size");
  detail::require_nonzero(X, "cpq_check");
  detail::require_nonzero(Y, "cpq_check");
  cplx pyx{1.0}, sum_diff{0.0}, sum_inv{0.0};
  for (std::size_t i = 0; i < N; ++i) {
    pyx *= Y[i] / X[i];
    sum_diff += X[i] - Y[i];
    sum_inv += 1.0 / X[i] - 1.0 / Y[i];
  }
  switch (row) {
    case CpqRow::C0m1: return {cpq_direct(X, Y, 0, -1), 1.0 - 1.0 / pyx};
    case CpqRow::Cm10: return {cpq_direct(X, Y, -1, 0), -1.0 + pyx};
    case CpqRow::C10: return {cpq_direct(X, Y, 1, 0), -hat_H(Y, X)};
    case CpqRow::C01: return {cpq_direct(X, Y, 0, 1), hat_H(X, Y)};
    case CpqRow::Cm12: return {cpq_direct(X, Y, -1, 2), pyx * hat_H(X, Y)};
    case CpqRow::Cm11_minus_C00:
      return {cpq_direct(X, Y, -1, 1) - cpq_direct(X, Y, 0, 0), (1.0 - pyx) * sum_diff};
    case CpqRow::C02_minus_C11:
      return {cpq_direct(X, Y, 0, 2) - cpq_direct(X, Y, 1, 1), -sum_diff * hat_H(X, Y)};
    case CpqRow::Cm21: return {cpq_direct(X, Y, -2, 1), -1.0 + pyx * (1.0 - sum_inv * sum_diff)};
  }
  throw std::invalid_argument("cpq_check: unknown row");
}

/**
 * Draws `count` complex points from the annulus 0.5 <= |w| <= 2, each at
 * least 0.05 away from every other point and from -1.
 */
inline CVec random_points(std::size_t count, Rng& rng) {
  CVec pts;
  while (pts.size() < count) {
    const double r = 0.5 + 1.5 * rng.uniform_open0();
    const double th = 2.0 * pi * rng.uniform_open0();
    const cplx w = std::polar(r, th);
    bool ok = std::abs(w + 1.0) >= 0.05;
    for (cplx p : pts) ok = ok && std::abs(w - p) >= 0.05;
    if (ok) pts.push_back(w);
  }
  return pts;
}

/** One randomized identity trial. */
struct TrialRow {
  std::string identity;
  int size = 0;
  std::uint64_t seed = 0;
  cplx lhs{0.0};
  cplx rhs{0.0};
  double rel = 0.0;
};

/** Identities available to randomized trials. */
inline const std::vector<std::string>& identity_names() {
  static const std::vector<std::string> names{"cauchy-gen", "sab", "sw", "sum-y", "cpq"};
  return names;
}

namespace detail {

inline std::vector<TrialRow> one_trial(const std::string& which, int size, std::uint64_t seed, std::uint64_t trial) {
  Rng rng(seed, 10, trial);
  std::vector<TrialRow> rows;
  auto push = [&](const std::string& name, std::pair<cplx, cplx> r) {
    rows.push_back({name, size, seed, r.first, r.second, rel_diff(r.first, r.second)});
  };
  const std::size_t N = static_cast<std::size_t>(size);
  if (which == "cauchy-gen") {
    CVec pts = random_points(2 * N + 1, rng);
    CVec X(pts.begin(), pts.begin() + N), Y(pts.begin() + N, pts.begin() + 2 * N);
    push(which, cauchy_gen_check(X, Y, pts.back()));
  } else if (which == "sab") {
    CVec pts = random_points(2 * N, rng);
    CVec W(pts.begin(), pts.begin() + N), Wp(pts.begin() + N, pts.end());
    const int a = static_cast<int>(rng.next() % 3), b = a + static_cast<int>(rng.next() % 4);
    push(which, {sab_direct(W, Wp, a, b), sab_det(W, Wp, a, b)});
  } else if (which == "sw") {
    CVec pts = random_points(2 * N, rng);
    CVec W1(pts.begin(), pts.begin() + N), W2(pts.begin() + N, pts.end());
    const int x = static_cast<int>(rng.next() % 4), y = static_cast<int>(rng.next() % (4 - x));
    const int n = 1 + static_cast<int>(rng.next() % N);
    push(which, {sw_direct(W1, W2, x, y, n), sw_closed(W1, W2, x, y, n)});
  } else if (which == "sum-y") {
    SumYParams p;
    const int total = static_cast<int>(rng.next() % 4);
    p.x = static_cast<int>(rng.next() % (total + 1));
    p.y = total - p.x;
    p.n = 1 + static_cast<int>(rng.next() % N);
    p.X.assign(N, 0);
    for (int i = 0; i < size; ++i) {
      if (i + 1 < p.n) p.X[i] = static_cast<int>(rng.next() % (p.x + 1));
      else if (i + 1 > p.n) p.X[i] = p.x + static_cast<int>(rng.next() % (p.y + 1));
      else p.X[i] = p.x;
    }
    std::sort(p.X.begin(), p.X.end());
    push(which, sum_y_check(p, [](cplx w) { return (w + 1.0) / ((w + 0.5) * (w + 0.5)); }));
  } else if (which == "cpq") {
    CVec pts = random_points(2 * N, rng);
    CVec X(pts.begin(), pts.begin() + N), Y(pts.begin() + N, pts.end());
    for (CpqRow r : kAllCpqRows) push("cpq " + cpq_name(r), cpq_check(X, Y, r));
  } else {
    throw std::invalid_argument("unknown identity: " + which);
  }
  return rows;
}

}  // namespace detail

/** Runs `trials` seeded trials of one identity; rows come back in trial order. */
inline std::vector<TrialRow> run_identity_trials(const std::string& which, int trials, int size, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be positive");
  if (size < 1) throw std::invalid_argument("size must be positive");
  if ((which == "sab" || which == "sw" || which == "sum-y") && size > 3)
    throw std::invalid_argument(which + ": size is capped at 3 to keep the enumeration small");
  std::vector<std::vector<TrialRow>> per(static_cast<std::size_t>(trials));
  parallel_for(per.size(), [&](std::size_t t) { per[t] = detail::one_trial(which, size, seed, t); });
  std::vector<TrialRow> out;
  for (auto& v : per) out.insert(out.end(), v.begin(), v.end());
  return out;
}

}  // namespace lpp
