#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "lpp/dlpp.hpp"
#include "lpp/identity_lab.hpp"

using namespace lpp;

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

CVec draw(std::size_t n, std::uint64_t seed, std::uint64_t index) {
  Rng rng(seed, 99, index);
  return random_points(n, rng);
}

double max_rel(const std::vector<TrialRow>& rows) {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, r.rel);
  return m;
}

}  // namespace

TEST_CASE("johansson_transition examples", "[identity]") {
  CHECK(std::abs(johansson_transition({1}, 2, 0.5, 1.5) - 0.25) < 1e-12);
  for (int x = 0; x <= 4; ++x) CHECK(std::abs(johansson_transition({x}, 1, 0.3, 1.5) - 0.7 * std::pow(0.3, x)) < 1e-12);
  for (int m = 1; m <= 4; ++m)
    for (int x = 0; x <= 5; ++x) {
      const double nb = binomial(x + m - 1, m - 1) * std::pow(0.6, m) * std::pow(0.4, x);
      CHECK(std::abs(johansson_transition({x}, m, 0.4, 2.0) - nb) < 1e-8);
    }
  CHECK_THROWS_AS(johansson_transition({2, 1}, 2, 0.5, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(johansson_transition({1}, 2, 0.5, 0.9), std::invalid_argument);
}

TEST_CASE("johansson_transition matches the geometric model at N = 2", "[identity][mc]") {
  const int m = 3;
  const double q = 0.5;
  const std::vector<int> X{1, 2};
  const double exact = johansson_transition(X, m, q, 1.5);
  // Column m of a geometric field: L(1,1 -> (m, j)) = x_j for j = 1, 2.
  struct Body {
    double x1, x2;
    int m;
    detail::GridState make_state() const { return {}; }
    bool operator()(Rng& rng, detail::GridState& s) const {
      detail::fill_weights(s.w, static_cast<std::size_t>(2 * m), Distribution::geometric(0.5), rng);
      detail::forward_values(s.w, m, 2, s.F);
      return s.F[static_cast<std::size_t>(m - 1) * 2] == x1 && s.F[static_cast<std::size_t>(m - 1) * 2 + 1] == x2;
    }
  } body{1.0, 2.0, m};
  const long long samples = 10000000;
  const auto est = make_estimate(detail::mc_count(samples, 5, 40, body), samples, 5);
  CHECK(std::abs(est.value - exact) < 4.0 * est.stderr_value);
}

TEST_CASE("probability_A examples", "[identity]") {
  const double q = 0.5;
  for (auto [x, y] : std::vector<std::pair<int, int>>{{0, 0}, {1, 1}, {2, 1}}) {
    const double exact = (1 - q) * (1 - q) * std::pow(q, x + y);
    CHECK(std::abs(probability_A(x, y, 1, 1, 2, 1, q, 1.7, 1.3) - exact) < 1e-8 * exact);
  }
  const double a = probability_A(1, 1, 1, 1, 2, 2, q, 1.7, 1.3);
  const double b = probability_A(1, 1, 1, 1, 2, 2, q, 1.4, 1.9);
  CHECK(std::abs(a - b) < 1e-8 * std::abs(a));
  CHECK(a >= 0.0);
  CHECK(a <= 1.0);
  const auto mc = mc_event_A(1, 1, 2, 2, q, 1, 1, 1000000, 13);
  CHECK(std::abs(mc.value - a) < 4.0 * mc.stderr_value);
  CHECK_THROWS_AS(probability_A(1, 1, 1, 1, 2, 2, q, 1.5, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(probability_A(-1, 1, 1, 1, 2, 2, q, 1.7, 1.3), std::invalid_argument);
}

TEST_CASE("sum_y_check examples", "[identity]") {
  auto F = [](cplx w) { return (w + 1.0) / ((w + 0.5) * (w + 0.5)); };
  SumYParams one;
  one.X = {2};
  one.x = 2;
  one.y = 1;
  const auto r1 = sum_y_check(one, F);
  CHECK(std::abs(r1.first - r1.second) < 1e-12 * std::abs(r1.second));

  for (int x = 0; x <= 3; ++x)
    for (int y = 0; x + y <= 3; ++y)
      for (int n = 1; n <= 2; ++n) {
        SumYParams p;
        p.x = x;
        p.y = y;
        p.n = n;
        p.X = n == 1 ? std::vector<int>{x, x + y} : std::vector<int>{0, x};
        const auto r = sum_y_check(p, F);
        CHECK(std::abs(r.first - r.second) < 1e-10 * std::max(1.0, std::abs(r.second)));
      }

  for (int x = 0; x <= 2; ++x)
    for (int y = 0; x + y <= 2; ++y) {
      SumYParams p;
      p.x = x;
      p.y = y;
      p.n = 2;
      p.X = {0, x, x + y};
      const auto r = sum_y_check(p, F);
      CHECK(std::abs(r.first - r.second) < 1e-9 * std::max(1.0, std::abs(r.second)));
    }
}

TEST_CASE("sab examples", "[identity]") {
  CHECK(std::abs(sab_direct({1.0}, {2.0}, 0, 1) - 5.0 / 6.0) < 1e-14);
  CHECK(std::abs(sab_det({1.0}, {2.0}, 0, 1) - 5.0 / 6.0) < 1e-14);
  const CVec W = draw(4, 1, 0);
  const CVec a(W.begin(), W.begin() + 2), b(W.begin() + 2, W.end());
  CHECK(rel_diff(sab_direct(a, b, 2, 2), sab_det(a, b, 2, 2)) < 1e-12);
  for (std::uint64_t t = 0; t < 20; ++t) {
    const CVec P = draw(4, 2, t);
    const CVec u(P.begin(), P.begin() + 2), v(P.begin() + 2, P.end());
    CHECK(rel_diff(sab_direct(u, v, 0, 3), sab_det(u, v, 0, 3)) < 1e-10);
  }
}

TEST_CASE("sw examples", "[identity]") {
  const CVec p1 = draw(2, 3, 0);
  CHECK(rel_diff(sw_direct({p1[0]}, {p1[1]}, 1, 2, 1), sw_closed({p1[0]}, {p1[1]}, 1, 2, 1)) < 1e-12);
  for (std::uint64_t t = 0; t < 20; ++t) {
    const CVec P = draw(4, 4, t);
    const CVec W1(P.begin(), P.begin() + 2), W2(P.begin() + 2, P.end());
    for (int x = 0; x <= 3; ++x) CHECK(rel_diff(sw_direct(W1, W2, x, 3 - x, 1), sw_closed(W1, W2, x, 3 - x, 1)) < 1e-8);
    CHECK(rel_diff(sw_direct(W1, W2, 0, 0, 2), sw_closed(W1, W2, 0, 0, 2)) < 1e-8);
  }
}

TEST_CASE("cauchy_gen_check examples", "[identity]") {
  const CVec P = draw(2, 5, 0);
  for (cplx z : {cplx(0.3, 0.1), cplx(-0.2, 0.4), cplx(0.0, -0.45)}) {
    const auto r = cauchy_gen_check({P[0]}, {P[1]}, z);
    CHECK(std::abs(r.first - P[1]) < 1e-13);
    CHECK(std::abs(r.second - P[1]) < 1e-13);
  }
  const CVec Q = draw(7, 5, 1);
  const auto r3 = cauchy_gen_check(CVec(Q.begin(), Q.begin() + 3), CVec(Q.begin() + 3, Q.begin() + 6), Q[6] * 0.2);
  CHECK(rel_diff(r3.first, r3.second) < 1e-10);
  CHECK(max_rel(run_identity_trials("cauchy-gen", 100, 5, 1)) < 1e-9);
}

TEST_CASE("cauchy_gen_check lhs is linear in z after removing (1-z)^(N-2)", "[identity][property]") {
  for (std::uint64_t t = 0; t < 10; ++t) {
    const CVec P = draw(8, 6, t);
    const CVec X(P.begin(), P.begin() + 4), Y(P.begin() + 4, P.end());
    auto g = [&](cplx z) { return cauchy_gen_check(X, Y, z).first / ipow(1.0 - z, 2); };
    const cplx z0{0.1, 0.0}, z1{-0.3, 0.2}, z2{0.25, -0.35};
    const cplx slope = (g(z1) - g(z0)) / (z1 - z0);
    const cplx predicted = g(z0) + slope * (z2 - z0);
    CHECK(rel_diff(predicted, g(z2)) < 1e-9);
  }
}

TEST_CASE("cpq examples", "[identity]") {
  const auto r = cpq_check({2.0}, {1.0}, CpqRow::C0m1);
  CHECK(std::abs(r.first + 1.0) < 1e-14);
  CHECK(std::abs(r.second + 1.0) < 1e-14);
  const CVec P = draw(6, 7, 0);
  const CVec X3(P.begin(), P.begin() + 3), Y3(P.begin() + 3, P.end());
  const auto c = cpq_check(X3, Y3, CpqRow::Cm12);
  CHECK(rel_diff(c.first, c.second) < 1e-10);
  const CVec Q = draw(8, 7, 1);
  const auto d = cpq_check(CVec(Q.begin(), Q.begin() + 4), CVec(Q.begin() + 4, Q.end()), CpqRow::C02_minus_C11);
  CHECK(rel_diff(d.first, d.second) < 1e-10);
  for (int N = 1; N <= 4; ++N) CHECK(max_rel(run_identity_trials("cpq", 25, N, 8)) < 1e-10);
}

TEST_CASE("every identity holds over 100 randomized trials", "[identity][property]") {
  for (const auto& name : identity_names()) {
    const int size = (name == "cauchy-gen" || name == "cpq") ? 4 : 2;
    CHECK(max_rel(run_identity_trials(name, 100, size, 21)) < 1e-8);
  }
  CHECK_THROWS_AS(run_identity_trials("sab", 1, 4, 1), std::invalid_argument);
  CHECK_THROWS_AS(run_identity_trials("nope", 1, 2, 1), std::invalid_argument);
}

TEST_CASE("identity trials do not depend on the thread count", "[identity][property]") {
  set_thread_count(1);
  const auto a = run_identity_trials("cpq", 10, 3, 4);
  set_thread_count(4);
  const auto b = run_identity_trials("cpq", 10, 3, 4);
  set_thread_count(0);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].lhs == b[i].lhs);
    CHECK(a[i].rhs == b[i].rhs);
  }
}
