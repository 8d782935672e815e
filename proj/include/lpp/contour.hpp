#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpp/parallel.hpp"

namespace lpp {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx two_pi_i{0.0, 2.0 * std::numbers::pi};

/** Integer power by repeated squaring; negative exponents invert. */
inline cplx ipow(cplx base, int e) {
  if (e < 0) return 1.0 / ipow(base, -e);
  cplx result{1.0};
  while (e > 0) {
    if (e & 1) result *= base;
    base *= base;
    e >>= 1;
  }
  return result;
}

/** Raised when an integrand is not finite at some quadrature node tuple. */
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, std::vector<cplx> tuple)
      : std::runtime_error(what), nodes(std::move(tuple)) {}
  std::vector<cplx> nodes;
};

/** Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration. */
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      dp = n * (z * p1 - p2) / (z * z - 1.0);
      double z_old = z;
      z = z_old - p1 / dp;
      if (std::abs(z - z_old) < 1e-16) break;
    }
    // Recompute the derivative at the converged root for the weight.
    double p1 = 1.0, p2 = 0.0;
    for (int j = 1; j <= n; ++j) {
      double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
    }
    dp = n * (z * p1 - p2) / (z * z - 1.0);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

/**
 * A discretized contour. Weights absorb dw/(2*pi*i), so an integral is the
 * plain sum of weight times integrand over the nodes.
 */
struct Contour {
  enum class Kind { Circle, RayPair, Hyperbola };
  Kind kind = Kind::Circle;
  // Circle descriptor
  cplx center{0.0};
  double radius = 0.0;
  // RayPair descriptor
  double anchor = 0.0;
  double angle = 0.0;
  double cutoff = 0.0;
  int panels = 0;
  int nodes_per_panel = 0;
  double grading = 1.0;
  // Hyperbola descriptor (shares anchor and angle)
  double step = 0.0;
  double half_range = 0.0;

  std::vector<cplx> nodes;
  std::vector<cplx> weights;

  std::size_t size() const { return nodes.size(); }

  std::string describe() const {
    std::ostringstream os;
    if (kind == Kind::Circle) {
      os << "circle(center=" << center.real() << ",radius=" << radius << ",n=" << size() << ")";
    } else if (kind == Kind::RayPair) {
      os << "ray_pair(anchor=" << anchor << ",angle=" << angle << ",cutoff=" << cutoff
         << ",panels=" << panels << ",nodes_per_panel=" << nodes_per_panel
         << ",grading=" << grading << ")";
    } else {
      os << "hyperbola(anchor=" << anchor << ",angle=" << angle << ",step=" << step
         << ",half_range=" << half_range << ",n=" << size() << ")";
    }
    return os.str();
  }
};

/** Counterclockwise circle with the n-point trapezoid rule. */
inline Contour circle(cplx center, double radius, int n) {
  if (!(radius > 0.0)) throw std::invalid_argument("circle: radius must be positive");
  if (n < 4 || n % 2 != 0) throw std::invalid_argument("circle: n must be even and at least 4");
  Contour c;
  c.kind = Contour::Kind::Circle;
  c.center = center;
  c.radius = radius;
  c.nodes.resize(n);
  c.weights.resize(n);
  const double dtheta = 2.0 * pi / n;
  for (int k = 0; k < n; ++k) {
    cplx e = std::polar(radius, k * dtheta);
    c.nodes[k] = center + e;
    // (node - center) * i * dtheta / (2 pi i)
    c.weights[k] = e * (dtheta / (2.0 * pi));
  }
  return c;
}

/**
 * Two rays anchor + t*exp(-i*angle) and anchor + t*exp(i*angle), t in
 * [0, cutoff], joined at the anchor and traversed from the lower ray to the
 * upper ray. Each ray is split into panels whose lengths grow by the factor
 * `grading` away from the anchor (1 gives equal panels), with Gauss-Legendre
 * nodes inside every panel.
 */
inline Contour ray_pair(double anchor, double angle, double cutoff, int panels,
                        int nodes_per_panel, double grading = 1.0) {
  if (!(angle > 0.0 && angle < pi)) throw std::invalid_argument("ray_pair: angle must lie in (0, pi)");
  if (!(cutoff > 0.0)) throw std::invalid_argument("ray_pair: cutoff must be positive");
  if (panels < 1 || nodes_per_panel < 1) throw std::invalid_argument("ray_pair: panel counts must be positive");
  if (!(grading > 0.0)) throw std::invalid_argument("ray_pair: grading must be positive");
  Contour c;
  c.kind = Contour::Kind::RayPair;
  c.anchor = anchor;
  c.angle = angle;
  c.cutoff = cutoff;
  c.panels = panels;
  c.nodes_per_panel = nodes_per_panel;
  c.grading = grading;

  std::vector<double> gx, gw;
  gauss_legendre(nodes_per_panel, gx, gw);
  std::vector<double> edges(panels + 1, 0.0);
  double total = 0.0, len = 1.0;
  for (int p = 0; p < panels; ++p) {
    total += len;
    len *= grading;
  }
  len = cutoff / total;
  for (int p = 0; p < panels; ++p) {
    edges[p + 1] = edges[p] + len;
    len *= grading;
  }
  edges[panels] = cutoff;

  std::vector<double> t, wt;
  for (int p = 0; p < panels; ++p) {
    double a = edges[p], b = edges[p + 1];
    for (int k = 0; k < nodes_per_panel; ++k) {
      t.push_back(0.5 * (a + b) + 0.5 * (b - a) * gx[k]);
      wt.push_back(0.5 * (b - a) * gw[k]);
    }
  }
  const cplx up = std::polar(1.0, angle);
  const cplx down = std::conj(up);
  const std::size_t m = t.size();
  c.nodes.reserve(2 * m);
  c.weights.reserve(2 * m);
  // Lower ray, travelling inwards to the anchor.
  for (std::size_t k = m; k-- > 0;) {
    c.nodes.push_back(anchor + t[k] * down);
    c.weights.push_back(-down * wt[k] / two_pi_i);
  }
  // Upper ray, travelling outwards from the anchor.
  for (std::size_t k = 0; k < m; ++k) {
    c.nodes.push_back(anchor + t[k] * up);
    c.weights.push_back(up * wt[k] / two_pi_i);
  }
  return c;
}

/**
 * Smooth two-armed contour anchor + (its asymptotic rays) given by
 * w(u) = 2b cosh(u + i*angle) with b = anchor / (2 cos(angle)), so that w(0) =
 * anchor and the arms approach the directions exp(+-i*angle). Traversed from
 * the lower arm to the upper arm with the trapezoid rule in u on
 * [-half_range, half_range]; the nodes sit at k*step and are symmetric under
 * conjugation. For angle = 2pi/3 (or pi/3) the cubic w^3 is real along the
 * contour up to a linear term, so cubic exponentials decay doubly
 * exponentially in u.
 */
inline Contour hyperbola(double anchor, double angle, double step, double half_range) {
  if (!(angle > 0.0 && angle < pi) || std::abs(angle - pi / 2.0) < 1e-12)
    throw std::invalid_argument("hyperbola: angle must lie in (0, pi) and differ from pi/2");
  if (!(anchor * std::cos(angle) > 0.0))
    throw std::invalid_argument("hyperbola: anchor must be nonzero and on the side the arms open to");
  if (!(step > 0.0) || !(half_range >= 0.0)) throw std::invalid_argument("hyperbola: bad step or range");
  Contour c;
  c.kind = Contour::Kind::Hyperbola;
  c.anchor = anchor;
  c.angle = angle;
  c.step = step;
  c.half_range = half_range;
  const double b = anchor / (2.0 * std::cos(angle));
  const int K = static_cast<int>(std::floor(half_range / step + 1e-9));
  for (int k = -K; k <= K; ++k) {
    const cplx w{k * step, angle};
    c.nodes.push_back(2.0 * b * std::cosh(w));
    c.weights.push_back(step * 2.0 * b * std::sinh(w) / two_pi_i);
  }
  return c;
}

/** Sum of weight times f(node) over one contour. */
template <class F>
cplx integrate(F&& f, const Contour& c) {
  cplx sum{0.0};
  for (std::size_t k = 0; k < c.size(); ++k) {
    cplx v = f(c.nodes[k]);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw QuadratureError("integrate: non-finite integrand", {c.nodes[k]});
    sum += c.weights[k] * v;
  }
  return sum;
}

/**
 * Tensor-product quadrature of f(points) over the given contours. The
 * outermost index is split across workers and partial sums are reduced in
 * index order, so the result does not depend on the thread count.
 */
template <class F>
cplx tensor_integrate(F&& f, const std::vector<Contour>& contours) {
  const std::size_t dim = contours.size();
  if (dim == 0) return f(std::vector<cplx>{});
  std::vector<cplx> partial(contours[0].size());
  parallel_for(contours[0].size(), [&](std::size_t i0) {
    std::vector<std::size_t> idx(dim, 0);
    std::vector<cplx> pts(dim);
    idx[0] = i0;
    cplx sum{0.0};
    for (;;) {
      cplx w{1.0};
      for (std::size_t d = 0; d < dim; ++d) {
        pts[d] = contours[d].nodes[idx[d]];
        w *= contours[d].weights[idx[d]];
      }
      cplx v = f(pts);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw QuadratureError("tensor_integrate: non-finite integrand", pts);
      sum += w * v;
      bool done = true;
      for (std::size_t d = dim; d-- > 1;) {
        if (++idx[d] < contours[d].size()) {
          done = false;
          break;
        }
        idx[d] = 0;
      }
      if (done) break;
    }
    partial[i0] = sum;
  });
  cplx total{0.0};
  for (const cplx& p : partial) total += p;
  return total;
}

/** Trapezoid value of the contour integral of g(z)/(1-z)^2 dz/(2 pi i) on |z| = radius. */
template <class G>
cplx z_series_integral(G&& g, double radius, int n) {
  if (!(radius > 0.0 && radius < 1.0))
    throw std::invalid_argument("z_series_integral: radius must lie in (0, 1)");
  Contour c = circle(0.0, radius, n);
  return integrate([&](cplx z) { return g(z) / ((1.0 - z) * (1.0 - z)); }, c);
}

}  // namespace lpp
