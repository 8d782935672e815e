#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "lpp/contour.hpp"
#include "lpp/parallel.hpp"

using namespace lpp;

TEST_CASE("circle examples", "[contour]") {
  CHECK(std::abs(integrate([](cplx w) { return 1.0 / w; }, circle(0.0, 0.5, 16)) - 1.0) < 1e-15);
  CHECK(std::abs(integrate([](cplx w) { return w * w; }, circle(0.0, 0.5, 16))) < 1e-15);
  CHECK(std::abs(integrate([](cplx w) { return 1.0 / ((w + 1.0) * (w + 1.0)); }, circle(-1.0, 0.3, 32))) < 1e-14);
  CHECK_THROWS_AS(circle(0.0, -1.0, 16), std::invalid_argument);
  CHECK_THROWS_AS(circle(0.0, 1.0, 7), std::invalid_argument);
}

TEST_CASE("circle trapezoid is exact for Laurent monomials", "[contour][property]") {
  const int n = 24;
  const Contour c = circle(cplx(0.2, -0.1), 0.7, n);
  CHECK(std::abs(integrate([](cplx) { return cplx(1.0); }, c)) < 1e-15);
  CHECK(std::abs(integrate([&](cplx w) { return 1.0 / (w - c.center); }, c) - 1.0) < 1e-15);
  for (int k = -n / 2 + 1; k < n / 2; ++k) {
    const cplx v = integrate([&](cplx w) { return ipow(w - c.center, k) / std::pow(0.7, k); }, c);
    CHECK(std::abs(v - (k == -1 ? cplx(0.7) : cplx(0.0))) < 1e-13);
  }
}

TEST_CASE("ray_pair examples", "[contour]") {
  const Contour rp = ray_pair(0.5, 2.0 * pi / 3.0, 8.0, 8, 12);
  const cplx ai0 = integrate([](cplx z) { return std::exp(-z * z * z / 3.0); }, rp);
  const cplx aip0 = integrate([](cplx z) { return z * std::exp(-z * z * z / 3.0); }, rp);
  CHECK(std::abs(ai0.real() - 0.355028053887817) < 1e-10);
  CHECK(std::abs(ai0.imag()) < 1e-12);
  CHECK(std::abs(aip0.real() + 0.258819403792807) < 1e-10);

  auto ai1 = [](double anchor) {
    return integrate([](cplx z) { return std::exp(-z * z * z / 3.0 + z); }, ray_pair(anchor, 2.0 * pi / 3.0, 8.0, 8, 12));
  };
  CHECK(std::abs(ai1(0.3) - ai1(0.8)) < 1e-12);
}

TEST_CASE("ray_pair is symmetric about the real axis", "[contour][property]") {
  const Contour rp = ray_pair(-0.4, 0.6 * pi, 6.0, 4, 8);
  const std::size_t n = rp.size();
  for (std::size_t k = 0; k < n; ++k) {
    CHECK(std::abs(rp.nodes[k] - std::conj(rp.nodes[n - 1 - k])) < 1e-15);
  }
  CHECK(rp.nodes.front().imag() < 0.0);
  CHECK(rp.nodes.back().imag() > 0.0);
}

TEST_CASE("hyperbola reproduces the Airy integral", "[contour]") {
  const Contour h = hyperbola(-0.5, 2.0 * pi / 3.0, 0.1, 4.0);
  const cplx ai0 = integrate([](cplx z) { return std::exp(-z * z * z / 3.0); }, h);
  CHECK(std::abs(ai0.real() - 0.355028053887817) < 1e-12);
  CHECK_THROWS_AS(hyperbola(0.5, 2.0 * pi / 3.0, 0.1, 4.0), std::invalid_argument);
}

TEST_CASE("tensor_integrate examples", "[contour]") {
  const Contour a = circle(0.0, 0.5, 16), b = circle(0.0, 0.4, 16), m1 = circle(-1.0, 0.5, 16);
  CHECK(std::abs(tensor_integrate([](const std::vector<cplx>& p) { return 1.0 / (p[0] * p[1]); }, {a, b}) - 1.0) < 1e-14);
  CHECK(std::abs(tensor_integrate([](const std::vector<cplx>& p) { return 1.0 / (p[0] * (p[1] + 1.0)); }, {a, m1}) - 1.0) < 1e-14);
}

TEST_CASE("tensor_integrate self-convergence and thread independence", "[contour][property]") {
  auto f = [](const std::vector<cplx>& p) {
    return std::exp(p[0] * p[1]) / ((p[0] - 0.1) * (p[1] + 0.2) * (p[2] - 0.05) * (p[3] + 0.3)) * std::cos(p[2] * p[3]);
  };
  auto run = [&](int n) {
    std::vector<Contour> cs;
    for (int d = 0; d < 4; ++d) cs.push_back(circle(0.0, 0.6, n));
    return tensor_integrate(f, cs);
  };
  // The nearest pole sits at half the radius, so the error decays like 2^-n.
  const cplx coarse = run(40), fine = run(80);
  CHECK(std::abs(coarse - fine) < 1e-10 * std::abs(fine));

  set_thread_count(1);
  const cplx one = run(16);
  set_thread_count(4);
  const cplx four = run(16);
  set_thread_count(0);
  CHECK(one == four);
}

TEST_CASE("z_series_integral examples", "[contour]") {
  CHECK(std::abs(z_series_integral([](cplx z) { return 1.0 - 1.0 / z; }, 0.5, 64) + 1.0) < 1e-14);
  CHECK(std::abs(z_series_integral([](cplx z) { return (1.0 - 1.0 / z) * (1.0 - 1.0 / z); }, 0.5, 64)) < 1e-14);
  CHECK(std::abs(z_series_integral([](cplx) { return cplx(1.0); }, 0.5, 64)) < 1e-14);
  CHECK_THROWS_AS(z_series_integral([](cplx) { return cplx(1.0); }, 1.5, 64), std::invalid_argument);
}
