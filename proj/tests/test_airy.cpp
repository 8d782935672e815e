#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "lpp/airy.hpp"

using namespace lpp;

namespace {

/** Ai and Ai' from the Maclaurin series with Ai(0) and Ai'(0) as constants. */
std::pair<double, double> airy_series(double x) {
  const double c1 = 0.355028053887817239, c2 = 0.258819403792806798;
  double f = 1.0, g = x, fp = 0.0, gp = 1.0;
  double tf = 1.0, tg = x;
  for (int k = 1; k < 60; ++k) {
    tf *= x * x * x / ((3.0 * k - 1.0) * (3.0 * k));
    tg *= x * x * x / ((3.0 * k) * (3.0 * k + 1.0));
    f += tf;
    g += tg;
    fp += 3.0 * k * tf / x;
    gp += (3.0 * k + 1.0) * tg / x;
  }
  return {c1 * f - c2 * g, c1 * fp - c2 * gp};
}

}  // namespace

TEST_CASE("airy at zero against the series constants", "[airy]") {
  CHECK(std::abs(airy(0.0) - 0.355028053887817) < 1e-10);
  CHECK(std::abs(airy_prime(0.0) + 0.258819403792807) < 1e-10);
}

TEST_CASE("airy matches the Maclaurin series near the origin", "[airy]") {
  for (double x = -2.0; x <= 2.0; x += 0.25) {
    if (x == 0.0) continue;
    const auto [a, d] = airy_series(x);
    CHECK(std::abs(airy(x) - a) < 1e-12);
    CHECK(std::abs(airy_prime(x) - d) < 1e-12);
  }
}

TEST_CASE("airy against tabulated values across the range", "[airy]") {
  struct Ref {
    double x, ai, aip;
  };
  const std::vector<Ref> refs{{1, 0.13529241631288141552, -0.15914744129679321279},
                              {-1, 0.5355608832923521188, -0.010160567116645209395},
                              {5, 0.00010834442813607441735, -0.000247413890868462476},
                              {-5, 0.35076100902411431979, 0.32719281855444313679},
                              {10, 1.1047532552898685934e-10, -3.5206336767389236366e-10},
                              {-10, 0.040241238486443190689, 0.9962650441327900559},
                              {20, 1.6916728686705403136e-27, -7.5863916257483549605e-27},
                              {-20, -0.17640612707798468959, 0.8928628567364712384}};
  for (const Ref& r : refs) {
    CHECK(std::abs(airy(r.x) - r.ai) <= 1e-13 * std::max(1.0, std::abs(r.ai)) + 1e-12 * std::abs(r.ai));
    CHECK(std::abs(airy_prime(r.x) - r.aip) <= 1e-13 * std::max(1.0, std::abs(r.aip)) + 1e-12 * std::abs(r.aip));
  }
  CHECK_THROWS_AS(airy(20.5), std::domain_error);
  CHECK_THROWS_AS(airy_prime(-21.0), std::domain_error);
}

TEST_CASE("airy satisfies the differential equation", "[airy]") {
  const double h = 1e-3;
  const double second = (airy(1.0 + h) - 2.0 * airy(1.0) + airy(1.0 - h)) / (h * h);
  CHECK(std::abs(second - airy(1.0)) < 1e-6);
}

TEST_CASE("airy kernel symmetry and diagonal continuity", "[airy]") {
  for (double x : {-3.0, -0.5, 0.0, 1.2, 4.0})
    for (double y : {-2.0, 0.3, 2.5}) CHECK(std::abs(airy_kernel(x, y) - airy_kernel(y, x)) < 1e-15);
  for (double x : {-3.0, 0.0, 2.0}) CHECK(std::abs(airy_kernel(x, x + 1e-7) - airy_kernel(x, x)) < 1e-6);
}

TEST_CASE("Nystrom matrix is positive semidefinite", "[airy][property]") {
  const Matrix<double> K = detail::airy_nystrom(-4.0, FredholmConfig{});
  for (std::size_t k = 1; k <= K.n; ++k) {
    Matrix<double> lead(k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) lead(i, j) = K(i, j);
    CHECK(determinant(lead) >= -1e-10);
  }
}

TEST_CASE("fgue is a distribution function", "[airy][property]") {
  CHECK(std::abs(fgue(6.0) - 1.0) < 1e-10);
  double prev = -1.0;
  for (int i = 0; i < 30; ++i) {
    const double s = -8.0 + 14.0 * i / 29.0;
    const double v = fgue(s);
    CHECK(v >= -1e-12);
    CHECK(v <= 1.0 + 1e-12);
    CHECK(v >= prev - 1e-14);
    prev = v;
  }
}

TEST_CASE("fgue order doubling stability", "[airy][property]") {
  FredholmConfig hi;
  hi.order = 80;
  for (double s = -6.0; s <= 4.0; s += 0.5) CHECK(std::abs(fgue(s) - fgue(s, hi)) < 1e-10);
  CHECK(std::abs(fgue(0.0) - 0.969372828355263) < 1e-12);
  CHECK(std::abs(fgue(-2.0) - 0.413224142505122) < 1e-12);
  CHECK_THROWS_AS(fgue(-11.0), std::domain_error);
  FredholmConfig low;
  low.order = 4;
  CHECK_THROWS_AS(fgue(0.0, low), std::invalid_argument);
}
