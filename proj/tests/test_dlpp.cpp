#include <catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <vector>

#include "lpp/dlpp.hpp"

using namespace lpp;
using Catch::Approx;

namespace {

/** Maximum path weight by enumerating every up/right path. */
double brute_force_max(const WeightField& f) {
  double best = -1.0;
  std::function<void(int, int, double)> walk = [&](int c, int r, double acc) {
    acc += f(c, r);
    if (c == f.cols && r == f.rows) {
      best = std::max(best, acc);
      return;
    }
    if (c < f.cols) walk(c + 1, r, acc);
    if (r < f.rows) walk(c, r + 1, acc);
  };
  walk(1, 1, 0.0);
  return best;
}

double path_weight(const WeightField& f, const LatticePath& p) {
  double s = 0.0;
  for (const Point& q : p.points) s += f(q.col, q.row);
  return s;
}

WeightField example_2x2() { return make_field({{1.0, 3.0}, {2.0, 4.0}}); }

}  // namespace

TEST_CASE("sample_weights examples", "[dlpp]") {
  const WeightField one = sample_weights(1, 1, Distribution::exponential(), 5, 0);
  REQUIRE(one.weights.size() == 1);
  CHECK(one(1, 1) > 0.0);

  const WeightField geo = sample_weights(2, 2, Distribution::geometric(0.5), 5, 0);
  for (double w : geo.weights) {
    CHECK(w >= 0.0);
    CHECK(w == std::floor(w));
  }

  const WeightField big = sample_weights(1000, 1000, Distribution::exponential(), 11, 0);
  double sum = 0.0;
  for (double w : big.weights) {
    CHECK(w > 0.0);
    sum += w;
  }
  CHECK(std::abs(sum / 1e6 - 1.0) < 0.003);
}

TEST_CASE("sample_weights is keyed by seed and stream", "[dlpp]") {
  const auto a = sample_weights(6, 7, Distribution::exponential(), 3, 1);
  const auto b = sample_weights(6, 7, Distribution::exponential(), 3, 1);
  const auto c = sample_weights(6, 7, Distribution::exponential(), 3, 2);
  CHECK(a.weights == b.weights);
  CHECK(a.weights != c.weights);
  CHECK_THROWS_AS(sample_weights(0, 3, Distribution::exponential(), 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(Distribution::geometric(1.0), std::invalid_argument);
}

TEST_CASE("passage tables on hand-built fields", "[dlpp]") {
  CHECK(forward_table(make_field({{2.5}})).total() == 2.5);
  const WeightField f = example_2x2();
  CHECK(forward_table(f)(2, 2) == 8.0);
  CHECK(backward_table(f)(1, 1) == 8.0);
}

TEST_CASE("forward total equals backward total and path enumeration", "[dlpp][property]") {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const WeightField f = sample_weights(5, 5, Distribution::exponential(), 42, s);
    const PassageTable F = forward_table(f), B = backward_table(f);
    CHECK(F(5, 5) == Approx(B(1, 1)).epsilon(1e-14));
    CHECK(F(5, 5) == Approx(brute_force_max(f)).epsilon(1e-14));
  }
}

TEST_CASE("DP recurrence holds cellwise", "[dlpp][property]") {
  for (auto dist : {Distribution::exponential(), Distribution::geometric(0.6)}) {
    const WeightField f = sample_weights(9, 7, dist, 8, 1);
    const PassageTable F = forward_table(f), B = backward_table(f);
    constexpr double ninf = -std::numeric_limits<double>::infinity();
    for (int c = 1; c <= f.cols; ++c)
      for (int r = 1; r <= f.rows; ++r) {
        const double left = c > 1 ? F(c - 1, r) : ninf, down = r > 1 ? F(c, r - 1) : ninf;
        const double prev = (c == 1 && r == 1) ? 0.0 : std::max(left, down);
        CHECK(F(c, r) == Approx(f(c, r) + prev).epsilon(1e-12));
        const double right = c < f.cols ? B(c + 1, r) : ninf, up = r < f.rows ? B(c, r + 1) : ninf;
        const double next = (c == f.cols && r == f.rows) ? 0.0 : std::max(right, up);
        CHECK(B(c, r) == Approx(f(c, r) + next).epsilon(1e-12));
      }
  }
}

TEST_CASE("geodesic examples", "[dlpp]") {
  const LatticePath g = geodesic(example_2x2());
  REQUIRE(g.points.size() == 3);
  CHECK(g.points[0] == Point{1, 1});
  CHECK(g.points[1] == Point{1, 2});
  CHECK(g.points[2] == Point{2, 2});

  const WeightField column = sample_weights(6, 1, Distribution::exponential(), 1, 0);
  const LatticePath v = geodesic(column);
  REQUIRE(v.points.size() == 6);
  for (int r = 1; r <= 6; ++r) CHECK(v.points[r - 1] == Point{1, r});
}

TEST_CASE("geodesic validity and weight sum", "[dlpp][property]") {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const WeightField f = sample_weights(8, 8, Distribution::exponential(), 9, s);
    const LatticePath g = geodesic(f);
    REQUIRE(g.points.size() == 15);
    CHECK(g.points.front() == Point{1, 1});
    CHECK(g.points.back() == Point{8, 8});
    for (std::size_t i = 1; i < g.points.size(); ++i) {
      const int dc = g.points[i].col - g.points[i - 1].col, dr = g.points[i].row - g.points[i - 1].row;
      CHECK(((dc == 1 && dr == 0) || (dc == 0 && dr == 1)));
    }
    CHECK(path_weight(f, g) == Approx(forward_table(f).total()).epsilon(1e-12));
  }
}

TEST_CASE("on_geodesic examples", "[dlpp]") {
  const WeightField f = example_2x2();
  const PassageTable F = forward_table(f), B = backward_table(f);
  CHECK(on_geodesic(F, B, {1, 2}, {2, 2}));
  // The geodesic goes up first, so the bottom-right boundary edge is off it.
  CHECK_FALSE(on_geodesic(F, B, {1, 1}, {2, 1}));
  CHECK_FALSE(on_geodesic(F, B, {2, 1}, {2, 2}));
  CHECK_THROWS_AS(on_geodesic(F, B, {1, 1}, {2, 2}), std::invalid_argument);
  CHECK_THROWS_AS(on_geodesic(F, B, {2, 2}, {3, 2}), std::out_of_range);
  CHECK_THROWS_AS(on_geodesic(B, F, {1, 1}, {1, 2}), std::invalid_argument);

  for (std::uint64_t s = 0; s < 50; ++s) {
    const WeightField g = sample_weights(4, 5, Distribution::exponential(), 2, s);
    const LatticePath p = geodesic(g);
    CHECK(on_geodesic(forward_table(g), backward_table(g), {1, 1}, p.points[1]));
  }
}

TEST_CASE("split identity marks exactly the geodesic edges", "[dlpp][property]") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const WeightField f = sample_weights(6, 5, Distribution::exponential(), 77, s);
    const PassageTable F = forward_table(f), B = backward_table(f);
    const LatticePath g = geodesic(f);
    int edges_on = 0;
    for (int c = 1; c <= f.cols; ++c)
      for (int r = 1; r <= f.rows; ++r)
        for (Point nxt : {Point{c + 1, r}, Point{c, r + 1}}) {
          if (!f.contains(nxt)) continue;
          const bool on = on_geodesic(F, B, {c, r}, nxt);
          bool consecutive = false;
          for (std::size_t i = 1; i < g.points.size(); ++i)
            if (g.points[i - 1] == Point{c, r} && g.points[i] == nxt) consecutive = true;
          CHECK(on == consecutive);
          edges_on += on;
        }
    CHECK(edges_on == f.cols + f.rows - 2);
  }
}

TEST_CASE("expected_distance examples", "[dlpp]") {
  CHECK(expected_distance({1, 1}, {1, 1}) == 0.0);
  CHECK(expected_distance({1, 1}, {4, 4}) == Approx(12.0).epsilon(1e-15));
  CHECK(expected_distance({1, 1}, {2, 5}) == Approx(9.0).epsilon(1e-15));
  CHECK_THROWS_AS(expected_distance({2, 2}, {1, 3}), std::invalid_argument);
}

TEST_CASE("exit_point examples", "[dlpp]") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const WeightField f = sample_weights(5, 6, Distribution::exponential(), 4, s);
    const LatticePath g = geodesic(f);
    const auto e = exit_point(f, antidiagonal(6, f.cols, f.rows));
    REQUIRE(e.has_value());
    CHECK(e->col + e->row == 6);
    CHECK(g.contains(*e));
    CHECK(*exit_point(f, g) == Point{f.cols, f.rows});
  }

  // Geodesic of this field: (1,1) (2,1) (2,2) (2,3) (3,3).
  const WeightField f = make_field({{1, 0, 0}, {5, 5, 5}, {0, 0, 1}});
  const LatticePath g = geodesic(f);
  REQUIRE(g.points.size() == 5);
  CHECK(g.points[1] == Point{2, 1});
  CHECK(g.points[3] == Point{2, 3});
  LatticePath cut{LatticePath::Kind::CutPath, {{3, 1}, {3, 2}, {2, 2}, {1, 2}, {1, 3}}};
  CHECK(*exit_point(f, cut) == Point{2, 2});
  LatticePath miss{LatticePath::Kind::CutPath, {{3, 1}, {3, 2}}};
  CHECK_FALSE(exit_point(f, miss).has_value());
}

TEST_CASE("mc_joint_probability examples", "[dlpp][mc]") {
  const auto half = mc_joint_probability(1, 1, 2, 2, StepDirection::Right, EventWindow::tail(0, 0), 1000000, 3);
  CHECK(std::abs(half.value - 0.5) < 3.0 * half.stderr_value);

  const auto one = mc_joint_probability(1, 1, 2, 1, StepDirection::Right, EventWindow::tail(0, 0), 100000, 3);
  CHECK(one.value == 1.0);

  const auto win = mc_joint_probability(1, 1, 2, 1, StepDirection::Right, EventWindow::interval(0.3, 0.1, 0.7, 0.1),
                                        10000000, 5);
  const double exact = (std::exp(-0.3) - std::exp(-0.4)) * (std::exp(-0.7) - std::exp(-0.8));
  CHECK(std::abs(win.value - exact) < 3.0 * win.stderr_value);

  CHECK_THROWS_AS(mc_joint_probability(2, 1, 2, 2, StepDirection::Right, EventWindow::tail(0, 0), 10, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(mc_joint_probability(1, 1, 2, 2, StepDirection::Right, EventWindow::tail(0, 0), 0, 1),
                  std::invalid_argument);
}

TEST_CASE("mc_event_A examples", "[dlpp][mc]") {
  const double q = 0.5;
  const auto e = mc_event_A(1, 1, 2, 1, q, 1, 2, 1000000, 9);
  const double exact = (1 - q) * (1 - q) * std::pow(q, 3);
  CHECK(std::abs(e.value - exact) < 3.0 * e.stderr_value);
  CHECK_THROWS_AS(mc_event_A(1, 1, 2, 1, q, -1, 0, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(mc_event_A(1, 1, 2, 1, q, 0, -2, 10, 1), std::invalid_argument);
}

TEST_CASE("antidiagonal sum rule", "[dlpp][property]") {
  const int M = 4, N = 3;
  const long long samples = 20000;
  for (int c = 2; c <= M + N; ++c) {
    const LatticePath cut = antidiagonal(c, M, N);
    double total = 0.0, var = 0.0;
    std::vector<long long> hits(cut.points.size(), 0);
    for (long long s = 0; s < samples; ++s) {
      const WeightField f = sample_weights(N, M, Distribution::exponential(), 21, static_cast<std::uint64_t>(s));
      const PassageTable F = forward_table(f), B = backward_table(f);
      for (std::size_t i = 0; i < cut.points.size(); ++i) {
        const Point p = cut.points[i];
        if (std::abs(F(p) + B(p) - f(p.col, p.row) - F.total()) <= 1e-9 * F.total()) ++hits[i];
      }
    }
    for (long long h : hits) {
      const double p = static_cast<double>(h) / samples;
      total += p;
      var += p * (1 - p) / samples;
    }
    CHECK(std::abs(total - 1.0) <= 3.0 * std::sqrt(var) + 1e-12);
  }
}

TEST_CASE("Monte Carlo is independent of the thread count", "[dlpp][property]") {
  set_thread_count(1);
  const auto a = mc_joint_probability(1, 1, 3, 2, StepDirection::Right, EventWindow::tail(1, 1), 50000, 17);
  set_thread_count(4);
  const auto b = mc_joint_probability(1, 1, 3, 2, StepDirection::Right, EventWindow::tail(1, 1), 50000, 17);
  set_thread_count(0);
  CHECK(a.value == b.value);

  set_thread_count(1);
  const auto c1 = mc_corollary_crossing(20, 1.0, 0.5, 300, 4);
  set_thread_count(3);
  const auto c3 = mc_corollary_crossing(20, 1.0, 0.5, 300, 4);
  set_thread_count(0);
  REQUIRE(c1.size() == c3.size());
  for (std::size_t i = 0; i < c1.size(); ++i) {
    CHECK(c1[i].x == c3[i].x);
    CHECK(c1[i].s1 == c3[i].s1);
  }
}

TEST_CASE("crossing location is symmetric at alpha = 1", "[dlpp][mc]") {
  const auto samples = mc_corollary_crossing(30, 1.0, 0.5, 4000, 12);
  double s = 0.0, s2 = 0.0;
  for (const auto& c : samples) {
    s += c.x;
    s2 += c.x * c.x;
  }
  const double n = static_cast<double>(samples.size());
  const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / n);
  CHECK(std::abs(mean) < 3.0 * se);
  for (double x : {0.25, 0.5, 1.0}) {
    double below = 0.0, above = 0.0;
    for (const auto& c : samples) {
      below += c.x <= -x;
      above += c.x >= x;
    }
    CHECK(std::abs(below - above) / n < 0.03);
  }
  CHECK_THROWS_AS(mc_corollary_crossing(5, 1.0, 0.5, 10, 1), std::invalid_argument);
}
