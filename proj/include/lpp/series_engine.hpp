#pragma once

// Shared evaluator for the nested contour series used by the finite and the
// limiting densities. A term of order (k1, k2) integrates 2(k1+k2) variables
// split into four groups U1, V1, U2, V2 (k1, k1, k2, k2 variables). The
// integrand is a product of single-variable factors, pairwise powers of
// differences, and a final function of a few accumulated statistics.
//
// The integrand is symmetric inside each group and vanishes when two
// variables of a group coincide, so the sum over ordered tuples equals
// k1!^2 k2!^2 times the sum over strictly increasing index sets. The U1 and
// V1 groups run over the union of an inner and an outer contour; the number
// j of outer nodes in a set selects the power (-z)^j of the z-dependent
// coefficient, so one pass yields the coefficients of a polynomial in z.
//
// The innermost variable is processed as a block over all its nodes with
// plain double arrays, which lets the compiler vectorize the hot loop.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "lpp/contour.hpp"
#include "lpp/parallel.hpp"

namespace lpp {

enum Group : int { GroupU1 = 0, GroupV1 = 1, GroupU2 = 2, GroupV2 = 3 };

/** Exponent of (x_a - x_b) for a variable of group a paired with one of group b >= a. */
constexpr int pair_exponent(int a, int b) {
  if (a == b) return 2;
  if (a == GroupU1 && b == GroupV1) return -2;
  if (a == GroupU2 && b == GroupV2) return -2;
  if (a == GroupU1 && b == GroupU2) return -1;
  if (a == GroupV1 && b == GroupV2) return -1;
  return 1;  // (U1, V2) and (V1, U2)
}

/** Number of statistics channels: five additive sums and one product. */
inline constexpr int kChannels = 6;
inline constexpr int kProductChannel = 5;

/** Statistics accumulated along a node tuple: five sums and one product. */
struct Moments {
  std::array<cplx, 5> s{};
  cplx p{1.0};

  Moments& operator+=(const Moments& o) {
    for (std::size_t i = 0; i < s.size(); ++i) s[i] += o.s[i];
    p *= o.p;
    return *this;
  }
  friend Moments operator+(Moments a, const Moments& b) { return a += b; }
};

/** Quadrature data for one variable group. */
struct GroupNodes {
  std::vector<cplx> x;               ///< node positions
  std::vector<cplx> factor;          ///< weight times the single-variable factor
  std::vector<unsigned char> outer;  ///< 1 for nodes on the outer alternative
  std::vector<Moments> moments;      ///< contribution of each node to the statistics

  std::size_t size() const { return x.size(); }
  void push(cplx node, cplx f, bool is_outer, const Moments& m) {
    x.push_back(node);
    factor.push_back(f);
    outer.push_back(is_outer ? 1 : 0);
    moments.push_back(m);
  }
};

/** Polynomial coefficients of one series term plus a magnitude diagnostic. */
struct SeriesCoefficients {
  std::vector<cplx> c;     ///< c[j] multiplies (-z)^j
  double max_abs = 0.0;    ///< largest root-sum-square of the summands over one innermost block
  double leaves = 0.0;     ///< number of node sets visited
};

/**
 * Channel values handed to a finishing function. A finishing function type
 * declares `additive_channels` (how many leading sums it reads) and
 * `uses_product`.
 */
struct Channels {
  double r[kChannels];
  double i[kChannels];
};

/** Evaluation options of the series engine. */
struct SeriesOptions {
  /**
   * Assert that every contour is symmetric under complex conjugation and that
   * all factors have real coefficients. The set sum is then real; only one
   * set of each conjugate orbit of the first group is visited and the
   * imaginary part is returned as exactly zero.
   */
  bool conjugate_symmetric = false;
};

namespace detail {

inline cplx pair_power(cplx d, int e) {
  switch (e) {
    case 2: return d * d;
    case -2: return 1.0 / (d * d);
    case -1: return 1.0 / d;
    default: return d;
  }
}

/** Structure-of-arrays copy of one group, optionally without outer nodes. */
struct SoaGroup {
  std::size_t n = 0;
  std::vector<cplx> x;
  std::vector<double> fr, fi, outer;
  std::vector<unsigned char> outer_flag;
  std::array<std::vector<double>, kChannels> cr, ci;
  std::vector<std::size_t> mirror;
  /** End of the leading run of inner nodes when all outer nodes follow it, else n. */
  std::size_t inner_end = 0;

  SoaGroup(const GroupNodes& g, bool drop_outer, bool want_mirror) {
    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < g.size(); ++k)
      if (!(drop_outer && g.outer[k])) keep.push_back(k);
    n = keep.size();
    x.resize(n);
    fr.resize(n);
    fi.resize(n);
    outer.resize(n);
    outer_flag.resize(n);
    for (auto& v : cr) v.resize(n);
    for (auto& v : ci) v.resize(n);
    for (std::size_t q = 0; q < n; ++q) {
      const std::size_t k = keep[q];
      x[q] = g.x[k];
      fr[q] = g.factor[k].real();
      fi[q] = g.factor[k].imag();
      outer_flag[q] = g.outer[k];
      outer[q] = g.outer[k] ? 1.0 : 0.0;
      for (int c = 0; c < 5; ++c) {
        cr[c][q] = g.moments[k].s[c].real();
        ci[c][q] = g.moments[k].s[c].imag();
      }
      cr[kProductChannel][q] = g.moments[k].p.real();
      ci[kProductChannel][q] = g.moments[k].p.imag();
    }
    inner_end = n;
    for (std::size_t q = 0; q < n; ++q)
      if (outer_flag[q]) {
        inner_end = q;
        break;
      }
    for (std::size_t q = inner_end; q < n; ++q)
      if (!outer_flag[q]) inner_end = n;
    if (want_mirror) build_mirror();
  }

  void build_mirror() {
    mirror.assign(n, n);
    for (std::size_t a = 0; a < n; ++a) {
      const cplx target = std::conj(x[a]);
      for (std::size_t b = 0; b < n; ++b) {
        if (outer_flag[b] != outer_flag[a]) continue;
        if (std::abs(x[b] - target) > 1e-12 * (1.0 + std::abs(target))) continue;
        const cplx fa{fr[a], fi[a]}, fb{fr[b], fi[b]};
        if (std::abs(fb - std::conj(fa)) > 1e-9 * std::abs(fa) + 1e-300) continue;
        mirror[a] = b;
        break;
      }
      if (mirror[a] == n)
        throw std::invalid_argument("series_coefficients: conjugate symmetry requested but nodes are not mirror-symmetric");
    }
  }
};

/** Pair table between two groups, row-major in the first group's index. */
struct SoaTable {
  std::vector<double> re, im;
};

template <class Finish>
class SeriesWalker {
 public:
  SeriesWalker(const std::vector<int>& role, const std::vector<SoaGroup>& g,
               const std::array<std::array<SoaTable, 4>, 4>& tab, int jmax, bool symmetric, const Finish& finish)
      : D_(static_cast<int>(role.size())), role_(role), g_(g), tab_(tab), jmax_(jmax), symmetric_(symmetric),
        finish_(finish), idx_(D_), vr_(D_), vi_(D_), ch_(D_), outs_(D_), acc_(jmax + 1) {
    std::size_t nmax = 0;
    for (const auto& gr : g_) nmax = std::max(nmax, gr.n);
    wr_.resize(nmax);
    wi_.resize(nmax);
    first_len_ = 1;
    while (first_len_ < D_ && role_[first_len_] == role_[0]) ++first_len_;
    pair_leaf_ = D_ >= 3 && role_[D_ - 1] == role_[D_ - 2] && D_ - 2 >= first_len_;
  }

  SeriesCoefficients run(std::size_t i0) {
    const SoaGroup& g = g_[role_[0]];
    const int o = g.outer_flag[i0];
    idx_[0] = i0;
    double weight = 1.0;
    if (symmetric_ && first_len_ == 1) weight = orbit_weight(0);
    if (o <= jmax_ && weight > 0.0) {
      vr_[0] = weight * g.fr[i0];
      vi_[0] = weight * g.fi[i0];
      for (int c = 0; c < kChannels; ++c) {
        ch_[0].r[c] = g.cr[c][i0];
        ch_[0].i[c] = g.ci[c][i0];
      }
      outs_[0] = o;
      descend(1);
    }
    SeriesCoefficients out;
    out.c = acc_;
    out.max_abs = std::sqrt(max_norm_);
    out.leaves = leaves_;
    return out;
  }

 private:
  /** 2, 1 or 0 as the first-group set is below, equal to or above its mirror image. */
  double orbit_weight(int last) const {
    const SoaGroup& g = g_[role_[0]];
    std::array<std::size_t, 16> img{};
    for (int e = 0; e <= last; ++e) img[e] = g.mirror[idx_[e]];
    std::sort(img.begin(), img.begin() + last + 1);
    for (int e = 0; e <= last; ++e) {
      if (idx_[e] < img[e]) return 2.0;
      if (idx_[e] > img[e]) return 0.0;
    }
    return 1.0;
  }

  void descend(int d) {
    const int r = role_[d];
    const SoaGroup& g = g_[r];
    const std::size_t n = g.n;
    const std::size_t start = (role_[d - 1] == r) ? idx_[d - 1] + 1 : 0;
    if (start >= n) return;
    const double br = vr_[d - 1], bi = vi_[d - 1];
    const int ob = outs_[d - 1];
    std::array<const double*, 16> rr{}, ri{};
    for (int e = 0; e < d; ++e) {
      const SoaTable& t = tab_[role_[e]][r];
      rr[e] = t.re.data() + idx_[e] * n;
      ri[e] = t.im.data() + idx_[e] * n;
    }
    if (pair_leaf_ && d == D_ - 2) {
      pair_leaf(d, g, start, br, bi, ob, rr, ri);
      return;
    }
    if (d == D_ - 1) {
      leaf(d, g, start, br, bi, ob, rr, ri);
      return;
    }
    const Channels& cb = ch_[d - 1];
    for (std::size_t i = start; i < n; ++i) {
      const int o = ob + g.outer_flag[i];
      if (o > jmax_) continue;
      double ar = br * g.fr[i] - bi * g.fi[i];
      double ai = br * g.fi[i] + bi * g.fr[i];
      for (int e = 0; e < d; ++e) {
        const double xr = rr[e][i], xi = ri[e][i];
        const double tr = ar * xr - ai * xi;
        ai = ar * xi + ai * xr;
        ar = tr;
      }
      idx_[d] = i;
      if (symmetric_ && d == first_len_ - 1) {
        const double w = orbit_weight(d);
        if (w == 0.0) continue;
        ar *= w;
        ai *= w;
      }
      vr_[d] = ar;
      vi_[d] = ai;
      add_channels(ch_[d], cb, g, i);
      outs_[d] = o;
      descend(d + 1);
    }
  }

  static void add_channels(Channels& c, const Channels& cb, const SoaGroup& g, std::size_t i) {
    for (int k = 0; k < kProductChannel; ++k) {
      c.r[k] = cb.r[k] + g.cr[k][i];
      c.i[k] = cb.i[k] + g.ci[k][i];
    }
    const double pr = cb.r[kProductChannel], pi_ = cb.i[kProductChannel];
    const double qr = g.cr[kProductChannel][i], qi = g.ci[kProductChannel][i];
    c.r[kProductChannel] = pr * qr - pi_ * qi;
    c.i[kProductChannel] = pr * qi + pi_ * qr;
  }

  /** Weights base * factor * prod of pair rows for nodes [start, n) into wr_, wi_. */
  void block_weights(int d, const SoaGroup& g, std::size_t start, double br, double bi,
                     const std::array<const double*, 16>& rr, const std::array<const double*, 16>& ri) {
    const std::size_t n = g.n;
    double* wr = wr_.data();
    double* wi = wi_.data();
    const double* fr = g.fr.data();
    const double* fi = g.fi.data();
    for (std::size_t i = start; i < n; ++i) {
      wr[i] = br * fr[i] - bi * fi[i];
      wi[i] = br * fi[i] + bi * fr[i];
    }
    for (int e = 0; e < d; ++e) {
      const double* xr = rr[e];
      const double* xi = ri[e];
      for (std::size_t i = start; i < n; ++i) {
        const double a = wr[i], b = wi[i];
        wr[i] = a * xr[i] - b * xi[i];
        wi[i] = a * xi[i] + b * xr[i];
      }
    }
  }

  /**
   * Sum over i in [from, n) of w_i * h(cb + channels_i) * extra_i, split by
   * the outer flag of i. Only the channels the finishing function reads are
   * formed. Without `Masked` every node in the range is an inner node.
   */
  template <bool Masked>
  void block_sum(const SoaGroup& g, std::size_t from, std::size_t n, const Channels& cb, const double* wr,
                 const double* wi, const double* er, const double* ei, double keep_outer, double& s_in_r,
                 double& s_in_i, double& s_out_r, double& s_out_i, double& nrm) const {
    constexpr int additive = Finish::additive_channels;
    constexpr bool product = Finish::uses_product;
    const double* outer = g.outer.data();
    std::array<const double*, kChannels> cr{}, ci{};
    for (int k = 0; k < kChannels; ++k) {
      cr[k] = g.cr[k].data();
      ci[k] = g.ci[k].data();
    }
    double a_r = 0.0, a_i = 0.0, b_r = 0.0, b_i = 0.0, q = 0.0;
#pragma omp simd reduction(+ : a_r, a_i, b_r, b_i, q)
    for (std::size_t i = from; i < n; ++i) {
      Channels c;
      for (int k = 0; k < additive; ++k) {
        c.r[k] = cb.r[k] + cr[k][i];
        c.i[k] = cb.i[k] + ci[k][i];
      }
      if constexpr (product) {
        const double pr = cb.r[kProductChannel], pi_ = cb.i[kProductChannel];
        const double qr = cr[kProductChannel][i], qi = ci[kProductChannel][i];
        c.r[kProductChannel] = pr * qr - pi_ * qi;
        c.i[kProductChannel] = pr * qi + pi_ * qr;
      }
      double hr, hi;
      finish_(c, hr, hi);
      double ur = wr[i], ui = wi[i];
      if (er != nullptr) {
        const double tr = ur * er[i] - ui * ei[i];
        ui = ur * ei[i] + ui * er[i];
        ur = tr;
      }
      const double tr = ur * hr - ui * hi;
      const double ti = ur * hi + ui * hr;
      if constexpr (Masked) {
        const double o = outer[i];
        const double in_w = 1.0 - o;
        const double out_w = o * keep_outer;
        a_r += in_w * tr;
        a_i += in_w * ti;
        b_r += out_w * tr;
        b_i += out_w * ti;
        q += (in_w + out_w) * (tr * tr + ti * ti);
      } else {
        a_r += tr;
        a_i += ti;
        q += tr * tr + ti * ti;
      }
    }
    s_in_r = a_r;
    s_in_i = a_i;
    s_out_r = b_r;
    s_out_i = b_i;
    nrm = q;
  }

  void block_sum_any(const SoaGroup& g, std::size_t from, std::size_t n, const Channels& cb, const double* er,
                     const double* ei, double keep_outer, double& a_r, double& a_i, double& b_r, double& b_i,
                     double& nrm) const {
    if (n <= g.inner_end)
      block_sum<false>(g, from, n, cb, wr_.data(), wi_.data(), er, ei, keep_outer, a_r, a_i, b_r, b_i, nrm);
    else
      block_sum<true>(g, from, n, cb, wr_.data(), wi_.data(), er, ei, keep_outer, a_r, a_i, b_r, b_i, nrm);
  }

  void leaf(int d, const SoaGroup& g, std::size_t start, double br, double bi, int ob,
            const std::array<const double*, 16>& rr, const std::array<const double*, 16>& ri) {
    block_weights(d, g, start, br, bi, rr, ri);
    // Outer nodes at the innermost level are kept only while j stays within jmax.
    const double keep_outer = (ob + 1 <= jmax_) ? 1.0 : 0.0;
    const std::size_t end = keep_outer > 0.0 ? g.n : g.inner_end;
    if (start >= end) return;
    double a_r, a_i, b_r, b_i, nrm;
    block_sum_any(g, start, end, ch_[d - 1], nullptr, nullptr, keep_outer, a_r, a_i, b_r, b_i, nrm);
    acc_[ob] += cplx(a_r, a_i);
    if (ob + 1 <= jmax_) acc_[ob + 1] += cplx(b_r, b_i);
    if (nrm > max_norm_) max_norm_ = nrm;
    leaves_ += static_cast<double>(end - start);
  }

  /** The last two variables belong to one group: sum over index pairs i < j directly. */
  void pair_leaf(int d, const SoaGroup& g, std::size_t start, double br, double bi, int ob,
                 const std::array<const double*, 16>& rr, const std::array<const double*, 16>& ri) {
    const std::size_t n = g.n;
    if (n - start < 2) return;
    // The parent weight enters once, so the block weights are formed without it.
    block_weights(d, g, start, 1.0, 0.0, rr, ri);
    const cplx base{br, bi};
    const SoaTable& self = tab_[role_[d]][role_[d]];
    const Channels& cb = ch_[d - 1];
    Channels ci;
    for (std::size_t i = start; i + 1 < n; ++i) {
      const int oi = ob + g.outer_flag[i];
      if (oi > jmax_) continue;
      add_channels(ci, cb, g, i);
      const double keep_outer = (oi + 1 <= jmax_) ? 1.0 : 0.0;
      const std::size_t end = keep_outer > 0.0 ? n : g.inner_end;
      if (i + 1 >= end) continue;
      double a_r, a_i, b_r, b_i, nrm;
      block_sum_any(g, i + 1, end, ci, self.re.data() + i * n, self.im.data() + i * n, keep_outer, a_r, a_i, b_r,
                    b_i, nrm);
      const cplx wi_c = base * cplx(wr_[i], wi_[i]);
      acc_[oi] += wi_c * cplx(a_r, a_i);
      if (oi + 1 <= jmax_) acc_[oi + 1] += wi_c * cplx(b_r, b_i);
      const double scaled = nrm * std::norm(wi_c);
      if (scaled > max_norm_) max_norm_ = scaled;
      leaves_ += static_cast<double>(end - i - 1);
    }
  }

  int D_;
  const std::vector<int>& role_;
  const std::vector<SoaGroup>& g_;
  const std::array<std::array<SoaTable, 4>, 4>& tab_;
  int jmax_;
  bool symmetric_;
  const Finish& finish_;
  int first_len_ = 1;
  bool pair_leaf_ = false;
  std::vector<std::size_t> idx_;
  std::vector<double> vr_, vi_;
  std::vector<Channels> ch_;
  std::vector<int> outs_;
  std::vector<cplx> acc_;
  std::vector<double> wr_, wi_;
  double max_norm_ = 0.0;
  double leaves_ = 0.0;
};

}  // namespace detail

/**
 * Coefficients c_j of the set-sum of one series term, indexed by the number
 * j <= jmax of nodes taken from outer alternatives. `finish(channels, hr, hi)`
 * writes the factor that depends on the accumulated statistics. Groups are
 * visited in order of increasing size so that the innermost loops are the
 * longest. Work is split over the first index and reduced in index order.
 */
template <class Finish>
SeriesCoefficients series_coefficients(int k1, int k2, const std::array<const GroupNodes*, 4>& groups,
                                       int jmax, const Finish& finish, const SeriesOptions& options = {}) {
  if (k1 < 0 || k2 < 0 || k1 + k2 == 0) throw std::invalid_argument("series_coefficients: bad order");
  if (2 * (k1 + k2) > 16) throw std::invalid_argument("series_coefficients: order too large");
  if (jmax < 0) throw std::invalid_argument("series_coefficients: jmax must be nonnegative");
  const std::array<int, 4> count{k1, k1, k2, k2};

  std::vector<detail::SoaGroup> soa;
  soa.reserve(4);
  for (int a = 0; a < 4; ++a) soa.emplace_back(*groups[a], jmax == 0, false);

  std::vector<int> order;
  for (int a = 0; a < 4; ++a)
    if (count[a] > 0) order.push_back(a);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (count[a] != count[b]) return count[a] < count[b];
    return soa[a].n < soa[b].n;
  });
  std::vector<int> role;
  for (int a : order)
    for (int k = 0; k < count[a]; ++k) role.push_back(a);
  if (options.conjugate_symmetric) soa[role[0]].build_mirror();

  std::array<std::array<detail::SoaTable, 4>, 4> tab;
  for (int a : order)
    for (int b : order) {
      const int e = pair_exponent(std::min(a, b), std::max(a, b));
      const auto& ga = soa[a];
      const auto& gb = soa[b];
      auto& t = tab[a][b];
      t.re.resize(ga.n * gb.n);
      t.im.resize(ga.n * gb.n);
      for (std::size_t i = 0; i < ga.n; ++i)
        for (std::size_t j = 0; j < gb.n; ++j) {
          cplx v{0.0};
          // The factor is always (lower group node - higher group node)^e.
          const cplx diff = a <= b ? ga.x[i] - gb.x[j] : gb.x[j] - ga.x[i];
          if (!(a == b && i == j)) {
            if (e < 0 && std::abs(diff) < 1e-12)
              throw QuadratureError("series_coefficients: node collision between contours", {ga.x[i], gb.x[j]});
            v = detail::pair_power(diff, e);
          }
          t.re[i * gb.n + j] = v.real();
          t.im[i * gb.n + j] = v.imag();
        }
    }

  const std::size_t n0 = soa[role[0]].n;
  std::vector<SeriesCoefficients> partial(n0);
  parallel_for(n0, [&](std::size_t i0) {
    detail::SeriesWalker<Finish> walker(role, soa, tab, jmax, options.conjugate_symmetric, finish);
    partial[i0] = walker.run(i0);
  });
  SeriesCoefficients total;
  total.c.assign(jmax + 1, cplx{0.0});
  for (const auto& p : partial) {
    for (int j = 0; j <= jmax; ++j) total.c[j] += p.c[j];
    total.max_abs = std::max(total.max_abs, p.max_abs);
    total.leaves += p.leaves;
  }
  for (auto& c : total.c) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw QuadratureError("series_coefficients: non-finite integrand sum", {});
    if (options.conjugate_symmetric) c = cplx(c.real(), 0.0);
  }
  return total;
}

/** Generalized binomial coefficient [x^p](1 - x)^a for integer a and p >= 0. */
inline double binomial_series_coeff(int a, int p) {
  if (p < 0) return 0.0;
  double c = 1.0;
  for (int i = 0; i < p; ++i) c *= static_cast<double>(a - i) / (i + 1);
  return (p % 2 == 0) ? c : -c;
}

/**
 * Exact value of the contour integral around 0 of
 * (1-z)^(k2-2k1-2) (1-1/z)^k1 (-z)^j dz/(2 pi i), by residues.
 */
inline double z_kernel_exact(int k1, int k2, int j) {
  const double sign = ((j + k1) % 2 == 0) ? 1.0 : -1.0;
  return sign * binomial_series_coeff(k2 - k1 - 2, k1 - j - 1);
}

/** Trapezoid value of the same contour integral on |z| = radius with n nodes. */
inline cplx z_kernel_trapezoid(int k1, int k2, int j, double radius, int n) {
  return z_series_integral(
      [&](cplx z) {
        return ipow(1.0 - z, k2 - 2 * k1) * ipow(1.0 - 1.0 / z, k1) * ipow(-z, j);
      },
      radius, n);
}

/** Largest j giving a nonzero kernel: the outer-node count never exceeds k1 - 1. */
inline int z_kernel_jmax(int k1) { return k1 - 1; }

}  // namespace lpp
