#pragma once

// Directed last passage percolation on a finite grid: weight sampling,
// passage-time tables, geodesics, and Monte Carlo estimators for the events
// whose probabilities the exact formulas describe.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lpp/parallel.hpp"
#include "lpp/rng.hpp"

namespace lpp {

/** Weight distribution: mean-one exponential or geometric with P(k) = (1-q) q^k. */
struct Distribution {
  enum class Kind { Exponential, Geometric };
  Kind kind = Kind::Exponential;
  double q = 0.5;

  static Distribution exponential() { return {}; }
  static Distribution geometric(double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("Distribution: q must lie in (0,1)");
    return {Kind::Geometric, q};
  }
  void validate() const {
    if (kind == Kind::Geometric && !(q > 0.0 && q < 1.0))
      throw std::invalid_argument("Distribution: q must lie in (0,1)");
  }
  double draw(Rng& rng) const { return kind == Kind::Exponential ? rng.exponential() : rng.geometric(q); }
};

/** 1-based lattice point (col, row). */
struct Point {
  int col = 1;
  int row = 1;
  friend bool operator==(const Point&, const Point&) = default;
};

/** Sampled weights on the cols x rows grid, addressed by 1-based (col, row). */
struct WeightField {
  int rows = 0;
  int cols = 0;
  Distribution dist;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::vector<double> weights;  ///< column-major: (col-1)*rows + (row-1)

  double operator()(int col, int row) const { return weights[index(col, row)]; }
  double& operator()(int col, int row) { return weights[index(col, row)]; }
  bool contains(Point p) const { return p.col >= 1 && p.col <= cols && p.row >= 1 && p.row <= rows; }
  std::size_t index(int col, int row) const {
    return static_cast<std::size_t>(col - 1) * static_cast<std::size_t>(rows) + static_cast<std::size_t>(row - 1);
  }
};

/** Fixed weights, for hand-built examples. `w[c][r]` is the weight at (c+1, r+1). */
inline WeightField make_field(const std::vector<std::vector<double>>& w) {
  if (w.empty() || w[0].empty()) throw std::invalid_argument("make_field: empty grid");
  WeightField f;
  f.cols = static_cast<int>(w.size());
  f.rows = static_cast<int>(w[0].size());
  f.weights.resize(static_cast<std::size_t>(f.cols * f.rows));
  for (int c = 1; c <= f.cols; ++c) {
    if (static_cast<int>(w[c - 1].size()) != f.rows) throw std::invalid_argument("make_field: ragged grid");
    for (int r = 1; r <= f.rows; ++r) {
      if (!(w[c - 1][r - 1] >= 0.0)) throw std::invalid_argument("make_field: weights must be nonnegative");
      f(c, r) = w[c - 1][r - 1];
    }
  }
  return f;
}

namespace detail {

inline void fill_weights(std::vector<double>& w, std::size_t count, const Distribution& dist, Rng& rng) {
  w.resize(count);
  if (dist.kind == Distribution::Kind::Exponential) {
    for (auto& v : w) v = rng.exponential();
  } else {
    const double inv_log_q = 1.0 / std::log(dist.q);
    for (auto& v : w) v = std::floor(std::log(rng.uniform_open0()) * inv_log_q);
  }
}

/** Forward recurrence on a column-major grid. */
inline void forward_values(const std::vector<double>& w, int cols, int rows, std::vector<double>& out) {
  out.resize(w.size());
  for (int c = 0; c < cols; ++c) {
    const std::size_t base = static_cast<std::size_t>(c) * rows;
    for (int r = 0; r < rows; ++r) {
      double best;
      if (c == 0 && r == 0) best = 0.0;
      else if (c == 0) best = out[base + r - 1];
      else if (r == 0) best = out[base - rows];
      else best = std::max(out[base + r - 1], out[base - rows + r]);
      out[base + r] = w[base + r] + best;
    }
  }
}

/** Backward recurrence: values at (c, r) are passage times from (c, r) to (cols, rows). */
inline void backward_values(const std::vector<double>& w, int cols, int rows, std::vector<double>& out) {
  out.resize(w.size());
  for (int c = cols - 1; c >= 0; --c) {
    const std::size_t base = static_cast<std::size_t>(c) * rows;
    for (int r = rows - 1; r >= 0; --r) {
      double best;
      if (c == cols - 1 && r == rows - 1) best = 0.0;
      else if (c == cols - 1) best = out[base + r + 1];
      else if (r == rows - 1) best = out[base + rows + r];
      else best = std::max(out[base + r + 1], out[base + rows + r]);
      out[base + r] = w[base + r] + best;
    }
  }
}

inline bool split_holds(double a, double b, double total) {
  return std::abs(a + b - total) <= 1e-9 * std::max(1.0, std::abs(total));
}

inline constexpr std::size_t kMcChunk = 4096;

/**
 * Runs `body(rng, sample)` for every sample index with its own keyed
 * generator and sums the returned counts chunk by chunk in index order.
 */
template <class Body>
long long mc_count(long long samples, std::uint64_t seed, std::uint64_t stream, Body&& body) {
  const std::size_t chunks = static_cast<std::size_t>((samples + kMcChunk - 1) / kMcChunk);
  std::vector<long long> counts(chunks, 0);
  parallel_for(chunks, [&](std::size_t ch) {
    auto state = body.make_state();
    const long long lo = static_cast<long long>(ch * kMcChunk);
    const long long hi = std::min<long long>(samples, lo + static_cast<long long>(kMcChunk));
    long long hits = 0;
    for (long long i = lo; i < hi; ++i) {
      Rng rng(seed, stream, static_cast<std::uint64_t>(i));
      hits += body(rng, state) ? 1 : 0;
    }
    counts[ch] = hits;
  });
  long long total = 0;
  for (long long c : counts) total += c;
  return total;
}

}  // namespace detail

/** Samples a rows x cols weight field; reproducible from (seed, stream). */
inline WeightField sample_weights(int rows, int cols, Distribution dist, std::uint64_t seed, std::uint64_t stream) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("sample_weights: rows and cols must be positive");
  dist.validate();
  WeightField f;
  f.rows = rows;
  f.cols = cols;
  f.dist = dist;
  f.seed = seed;
  f.stream = stream;
  Rng rng(seed, stream, 0);
  detail::fill_weights(f.weights, static_cast<std::size_t>(rows) * cols, dist, rng);
  return f;
}

/** Passage times L_{(1,1)}(i,j) (Forward) or L_{(i,j)}(M,N) (Backward). */
struct PassageTable {
  enum class Direction { Forward, Backward };
  Direction direction = Direction::Forward;
  int rows = 0;
  int cols = 0;
  std::vector<double> values;

  double operator()(int col, int row) const {
    return values[static_cast<std::size_t>(col - 1) * rows + static_cast<std::size_t>(row - 1)];
  }
  double operator()(Point p) const { return (*this)(p.col, p.row); }
  bool contains(Point p) const { return p.col >= 1 && p.col <= cols && p.row >= 1 && p.row <= rows; }
  /** The total passage time L_{(1,1)}(M,N). */
  double total() const { return direction == Direction::Forward ? (*this)(cols, rows) : (*this)(1, 1); }
};

inline PassageTable forward_table(const WeightField& f) {
  PassageTable t{PassageTable::Direction::Forward, f.rows, f.cols, {}};
  detail::forward_values(f.weights, f.cols, f.rows, t.values);
  return t;
}

inline PassageTable backward_table(const WeightField& f) {
  PassageTable t{PassageTable::Direction::Backward, f.rows, f.cols, {}};
  detail::backward_values(f.weights, f.cols, f.rows, t.values);
  return t;
}

/** Ordered lattice points; geodesics step up/right, cut paths step up/left. */
struct LatticePath {
  enum class Kind { Geodesic, CutPath };
  Kind kind = Kind::Geodesic;
  std::vector<Point> points;

  bool contains(Point p) const { return std::find(points.begin(), points.end(), p) != points.end(); }
};

/**
 * A maximizing up/right path from (1,1) to (M,N), found by backtracking the
 * forward table. On ties the vertical predecessor (col, row-1) is preferred.
 */
inline LatticePath geodesic(const WeightField& f) {
  const PassageTable F = forward_table(f);
  LatticePath path{LatticePath::Kind::Geodesic, {}};
  Point p{f.cols, f.rows};
  path.points.push_back(p);
  while (!(p.col == 1 && p.row == 1)) {
    if (p.col == 1) --p.row;
    else if (p.row == 1) --p.col;
    else if (F(p.col, p.row - 1) >= F(p.col - 1, p.row)) --p.row;
    else --p.col;
    path.points.push_back(p);
  }
  std::reverse(path.points.begin(), path.points.end());
  return path;
}

/** Split identity F(r) + B(r+) = L_{(1,1)}(M,N), relative tolerance 1e-9. */
inline bool on_geodesic(const PassageTable& forward, const PassageTable& backward, Point r, Point r_plus) {
  if (forward.direction != PassageTable::Direction::Forward || backward.direction != PassageTable::Direction::Backward)
    throw std::invalid_argument("on_geodesic: expected a forward and a backward table");
  if (!forward.contains(r) || !forward.contains(r_plus)) throw std::out_of_range("on_geodesic: point outside the grid");
  const int dc = r_plus.col - r.col, dr = r_plus.row - r.row;
  if (!((dc == 1 && dr == 0) || (dc == 0 && dr == 1)))
    throw std::invalid_argument("on_geodesic: r_plus - r must be (1,0) or (0,1)");
  return detail::split_holds(forward(r), backward(r_plus), forward.total());
}

/** Centering d(p, q) = (sqrt(q1-p1) + sqrt(q2-p2))^2. */
inline double expected_distance(Point p, Point q) {
  const int a = q.col - p.col, b = q.row - p.row;
  if (a < 0 || b < 0) throw std::invalid_argument("expected_distance: q - p must be componentwise nonnegative");
  const double s = std::sqrt(static_cast<double>(a)) + std::sqrt(static_cast<double>(b));
  return s * s;
}

/** Last point of the geodesic lying on `cut`, or nothing when they do not meet. */
inline std::optional<Point> exit_point(const WeightField& f, const LatticePath& cut) {
  const LatticePath g = geodesic(f);
  std::optional<Point> last;
  for (const Point& p : g.points)
    if (cut.contains(p)) last = p;
  return last;
}

/** The up/left cut path along the antidiagonal col + row = c inside the grid. */
inline LatticePath antidiagonal(int c, int cols, int rows) {
  LatticePath path{LatticePath::Kind::CutPath, {}};
  for (int col = std::min(cols, c - 1); col >= 1; --col) {
    const int row = c - col;
    if (row >= 1 && row <= rows) path.points.push_back({col, row});
  }
  if (path.points.empty()) throw std::invalid_argument("antidiagonal: no grid point on the line");
  return path;
}

/** Monte Carlo frequency with its binomial standard error. */
struct MonteCarloEstimate {
  double value = 0.0;
  double stderr_value = 0.0;
  long long samples = 0;
  std::uint64_t seed = 0;
};

inline MonteCarloEstimate make_estimate(long long hits, long long samples, std::uint64_t seed) {
  MonteCarloEstimate e;
  e.samples = samples;
  e.seed = seed;
  e.value = static_cast<double>(hits) / static_cast<double>(samples);
  e.stderr_value = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(samples));
  return e;
}

/** Which neighbour r' follows r = (m, n) on the geodesic. */
enum class StepDirection { Right, Up };

/** Window on the two passage times: closed intervals or lower thresholds. */
struct EventWindow {
  enum class Mode { Interval, Tail };
  Mode mode = Mode::Tail;
  double t1 = 0.0, eps1 = 0.0, t2 = 0.0, eps2 = 0.0;

  static EventWindow interval(double t1, double e1, double t2, double e2) { return {Mode::Interval, t1, e1, t2, e2}; }
  static EventWindow tail(double t1, double t2) { return {Mode::Tail, t1, 0.0, t2, 0.0}; }

  bool accepts(double a, double b) const {
    if (mode == Mode::Tail) return a >= t1 && b >= t2;
    return a >= t1 && a <= t1 + eps1 && b >= t2 && b <= t2 + eps2;
  }
};

namespace detail {

struct GridState {
  std::vector<double> w, F, B;
};

inline void check_grid_indices(int m, int n, int M, int N, StepDirection dir) {
  if (M < 1 || N < 1) throw std::invalid_argument("monte carlo: M and N must be positive");
  if (dir == StepDirection::Right && !(m >= 1 && m <= M - 1 && n >= 1 && n <= N))
    throw std::invalid_argument("monte carlo: need 1 <= m <= M-1 and 1 <= n <= N for a right step");
  if (dir == StepDirection::Up && !(n >= 1 && n <= N - 1 && m >= 1 && m <= M))
    throw std::invalid_argument("monte carlo: need 1 <= n <= N-1 and 1 <= m <= M for an up step");
}

inline void check_samples(long long samples) {
  if (samples < 1) throw std::invalid_argument("monte carlo: samples must be positive");
}

}  // namespace detail

/**
 * Frequency of {r, r' on the geodesic, L_{(1,1)}(r) and L_{r'}(M,N) inside
 * the window} with r = (m, n) and r' its right or upper neighbour.
 */
inline MonteCarloEstimate mc_joint_probability(int m, int n, int M, int N, StepDirection dir, EventWindow window,
                                               long long samples, std::uint64_t seed,
                                               Distribution dist = Distribution::exponential()) {
  detail::check_grid_indices(m, n, M, N, dir);
  detail::check_samples(samples);
  dist.validate();
  if (window.mode == EventWindow::Mode::Interval && (window.t1 < 0.0 || window.t2 < 0.0 || window.eps1 < 0.0 || window.eps2 < 0.0))
    throw std::invalid_argument("mc_joint_probability: interval windows need nonnegative t and eps");
  const std::size_t cells = static_cast<std::size_t>(M) * N;
  const std::size_t ir = static_cast<std::size_t>(m - 1) * N + (n - 1);
  const std::size_t irp = dir == StepDirection::Right ? ir + N : ir + 1;
  struct Body {
    const Distribution& dist;
    std::size_t cells, ir, irp;
    int M, N;
    const EventWindow& window;
    detail::GridState make_state() const { return {}; }
    bool operator()(Rng& rng, detail::GridState& s) const {
      detail::fill_weights(s.w, cells, dist, rng);
      detail::forward_values(s.w, M, N, s.F);
      detail::backward_values(s.w, M, N, s.B);
      const double a = s.F[ir], b = s.B[irp];
      return detail::split_holds(a, b, s.F[cells - 1]) && window.accepts(a, b);
    }
  } body{dist, cells, ir, irp, M, N, window};
  const long long hits = detail::mc_count(samples, seed, 1, body);
  return make_estimate(hits, samples, seed);
}

/**
 * Frequency of event A for geometric weights: some geodesic passes through
 * (m, n) and (m+1, n) with L_{(1,1)}(m,n) = x and L_{(m+1,n)}(M,N) = y.
 */
inline MonteCarloEstimate mc_event_A(int m, int n, int M, int N, double q, long long x, long long y,
                                     long long samples, std::uint64_t seed) {
  if (x < 0 || y < 0) throw std::invalid_argument("mc_event_A: x and y must be nonnegative");
  const Distribution dist = Distribution::geometric(q);
  detail::check_grid_indices(m, n, M, N, StepDirection::Right);
  detail::check_samples(samples);
  const std::size_t cells = static_cast<std::size_t>(M) * N;
  const std::size_t ir = static_cast<std::size_t>(m - 1) * N + (n - 1);
  const std::size_t irp = ir + N;
  struct Body {
    const Distribution& dist;
    std::size_t cells, ir, irp;
    int M, N;
    double x, y;
    detail::GridState make_state() const { return {}; }
    bool operator()(Rng& rng, detail::GridState& s) const {
      detail::fill_weights(s.w, cells, dist, rng);
      detail::forward_values(s.w, M, N, s.F);
      detail::backward_values(s.w, M, N, s.B);
      return s.F[ir] == x && s.B[irp] == y && s.F[cells - 1] == x + y;
    }
  } body{dist, cells, ir, irp, M, N, static_cast<double>(x), static_cast<double>(y)};
  const long long hits = detail::mc_count(samples, seed, 2, body);
  return make_estimate(hits, samples, seed);
}

/** One sample of the scaled crossing location and the two scaled passage times. */
struct CrossingSample {
  double x = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
};

/** Grid and scale factors of the KPZ scaling with aspect ratio alpha and cut fraction gamma. */
struct CrossingScaling {
  int N = 0;
  int M = 0;
  int diagonal = 0;      ///< the cut is col + row = diagonal
  double x1_scale = 0.0;  ///< column displacement per unit of x1
  double x2_scale = 0.0;  ///< row displacement per unit of x2
  double t_scale = 0.0;   ///< passage-time fluctuation scale

  CrossingScaling(int n_rows, double alpha, double gamma) : N(n_rows) {
    if (!(alpha > 0.0)) throw std::invalid_argument("scaling: alpha must be positive");
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("scaling: gamma must lie in (0,1)");
    const double Nd = n_rows;
    M = static_cast<int>(std::floor(alpha * Nd));
    diagonal = static_cast<int>(std::floor(gamma * (1.0 + alpha) * Nd));
    const double c = std::pow(1.0 + std::sqrt(alpha), 2.0 / 3.0);
    x1_scale = std::pow(alpha, 2.0 / 3.0) * c * std::pow(Nd, 2.0 / 3.0);
    x2_scale = std::pow(alpha, -1.0 / 3.0) * c * std::pow(Nd, 2.0 / 3.0);
    t_scale = std::pow(alpha, -1.0 / 6.0) * c * c * std::cbrt(Nd);
    centre_col = gamma * alpha * Nd;
    centre_row = gamma * Nd;
  }

  /** Scaled location x = x2 - x1 of the lattice point p. */
  double location(Point p) const { return (p.row - centre_row) / x2_scale - (p.col - centre_col) / x1_scale; }

 private:
  double centre_col = 0.0;
  double centre_row = 0.0;
};

/**
 * Samples the exit point of the geodesic on the antidiagonal cut together
 * with the centered, scaled passage times before and after it.
 */
inline std::vector<CrossingSample> mc_corollary_crossing(int N, double alpha, double gamma, long long samples,
                                                         std::uint64_t seed) {
  if (N < 10) throw std::invalid_argument("mc_corollary_crossing: N must be at least 10");
  detail::check_samples(samples);
  const CrossingScaling sc(N, alpha, gamma);
  const int M = sc.M;
  if (M < 2 || sc.diagonal < 3 || sc.diagonal >= M + N) throw std::invalid_argument("mc_corollary_crossing: degenerate grid");
  const std::size_t cells = static_cast<std::size_t>(M) * N;
  const Distribution dist = Distribution::exponential();
  std::vector<CrossingSample> out(static_cast<std::size_t>(samples));
  const std::size_t chunk = 64;
  const std::size_t chunks = (out.size() + chunk - 1) / chunk;
  parallel_for(chunks, [&](std::size_t ch) {
    detail::GridState s;
    for (std::size_t i = ch * chunk; i < std::min(out.size(), (ch + 1) * chunk); ++i) {
      Rng rng(seed, 3, i);
      detail::fill_weights(s.w, cells, dist, rng);
      detail::forward_values(s.w, M, N, s.F);
      detail::backward_values(s.w, M, N, s.B);
      // The geodesic meets the antidiagonal once, at the point maximizing F + B - w.
      Point best{0, 0};
      double best_val = -std::numeric_limits<double>::infinity();
      for (int col = 1; col <= M; ++col) {
        const int row = sc.diagonal - col;
        if (row < 1 || row > N) continue;
        const std::size_t k = static_cast<std::size_t>(col - 1) * N + (row - 1);
        const double v = s.F[k] + s.B[k] - s.w[k];
        if (v > best_val) {
          best_val = v;
          best = {col, row};
        }
      }
      const std::size_t k = static_cast<std::size_t>(best.col - 1) * N + (best.row - 1);
      Point next = best;
      double after = 0.0;
      const bool can_right = best.col < M, can_up = best.row < N;
      if (can_right && (!can_up || s.B[k + N] >= s.B[k + 1])) {
        next.col += 1;
        after = s.B[k + N];
      } else {
        next.row += 1;
        after = s.B[k + 1];
      }
      CrossingSample cs;
      cs.x = sc.location(best);
      cs.s1 = (s.F[k] - expected_distance({1, 1}, best)) / sc.t_scale;
      cs.s2 = (after - expected_distance(next, {M, N})) / sc.t_scale;
      out[i] = cs;
    }
  });
  return out;
}

}  // namespace lpp
