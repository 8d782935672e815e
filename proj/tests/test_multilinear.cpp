#include <catch_amalgamated.hpp>

#include <algorithm>
#include <complex>
#include <numeric>
#include <vector>

#include "lpp/multilinear.hpp"
#include "lpp/rng.hpp"

using namespace lpp;
using cplx = std::complex<double>;
using CV = std::vector<cplx>;

namespace {

cplx random_c(Rng& rng) { return {2.0 * rng.uniform_open0() - 1.0, 2.0 * rng.uniform_open0() - 1.0}; }

/** Determinant by Laplace expansion along the first row. */
cplx cofactor_det(const Matrix<cplx>& m) {
  if (m.n == 0) return 1.0;
  if (m.n == 1) return m(0, 0);
  cplx s = 0.0;
  for (std::size_t j = 0; j < m.n; ++j) s += ((j % 2) ? -1.0 : 1.0) * m(0, j) * cofactor_det(m.minor(0, j));
  return s;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("delta examples", "[multilinear]") {
  CHECK(delta(CV{}) == cplx(1.0));
  CHECK(delta(CV{5.0}) == cplx(1.0));
  CHECK(delta(CV{1.0, 2.0, 3.0}) == cplx(2.0));
  CHECK(delta(CV{1.0, 1.0, 2.0}) == cplx(0.0));
}

TEST_CASE("delta_cross examples", "[multilinear]") {
  CHECK(delta_cross(CV{}, CV{1.0, 2.0}) == cplx(1.0));
  CHECK(delta_cross(CV{1.0, 2.0}, CV{3.0, 4.0}) == cplx(12.0));
  CHECK(delta_cross(CV{1.0, 2.0}, CV{2.0, 4.0}) == cplx(0.0));
}

TEST_CASE("prod_apply examples", "[multilinear]") {
  CHECK(prod_apply([](cplx w) { return w; }, CV{}) == cplx(1.0));
  CHECK(prod_apply([](cplx w) { return w * w; }, CV{2.0, 3.0}) == cplx(36.0));
  CHECK(prod_apply([](cplx w) { return std::exp(w); }, CV{0.0, 0.0}) == cplx(1.0));
}

TEST_CASE("cauchy_factor examples", "[multilinear]") {
  CHECK(cauchy_factor(CV{1.0}, CV{2.0}) == cplx(-1.0));
  const CV w{0.3, cplx(1.0, 2.0), -0.7};
  CHECK(cauchy_factor(w, CV{}) == delta(w));
  CHECK_THROWS_AS(cauchy_factor(CV{1.0}, CV{1.0}), std::domain_error);
}

TEST_CASE("cauchy_factor equals the signed Cauchy determinant", "[multilinear][property]") {
  Rng rng(3, 0, 0);
  for (int trial = 0; trial < 50; ++trial)
    for (std::size_t k = 1; k <= 4; ++k) {
      CV w(k), wp(k);
      // Well separated points keep the LU determinant accurate to a few ulps of its condition.
      for (std::size_t i = 0; i < k; ++i) {
        do w[i] = random_c(rng);
        while (std::any_of(w.begin(), w.begin() + i, [&](cplx u) { return std::abs(u - w[i]) < 0.2; }));
      }
      for (auto& v : wp) v = random_c(rng) + 3.0;
      Matrix<cplx> C(k);
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) C(i, j) = 1.0 / (w[i] - wp[j]);
      const double sign = ((k * (k - 1) / 2) % 2) ? -1.0 : 1.0;
      // Cancellation in the determinant: sum of |Leibniz terms| over |det|.
      std::vector<std::size_t> perm(k);
      std::iota(perm.begin(), perm.end(), 0);
      double mass = 0.0;
      do {
        double t = 1.0;
        for (std::size_t i = 0; i < k; ++i) t *= std::abs(C(i, perm[i]));
        mass += t;
      } while (std::next_permutation(perm.begin(), perm.end()));
      const cplx exact = cauchy_factor(w, wp);
      CHECK(rel(exact, sign * determinant(C)) < 1e-13 * std::max(1.0, mass / std::abs(exact)));
    }
}

TEST_CASE("delta is multiplicative under appending", "[multilinear][property]") {
  Rng rng(4, 0, 0);
  for (int trial = 0; trial < 50; ++trial) {
    CV w(4);
    for (auto& v : w) v = random_c(rng);
    const cplx extra = random_c(rng);
    CV wx = w;
    wx.push_back(extra);
    const cplx expected = delta(w) * prod_apply([&](cplx x) { return extra - x; }, w);
    CHECK(rel(delta(wx), expected) < 1e-13);
  }
}

TEST_CASE("determinant examples", "[multilinear]") {
  CHECK(determinant(Matrix<cplx>::identity(3)) == cplx(1.0));
  Matrix<cplx> m(2);
  m(0, 0) = 1.0;
  m(0, 1) = cplx(0, 1);
  m(1, 0) = cplx(0, 1);
  m(1, 1) = 1.0;
  CHECK(std::abs(determinant(m) - cplx(2.0)) < 1e-15);
  CHECK(determinant(Matrix<cplx>(0)) == cplx(1.0));
}

TEST_CASE("determinant agrees with cofactor expansion", "[multilinear][property]") {
  Rng rng(5, 0, 0);
  for (int trial = 0; trial < 50; ++trial)
    for (std::size_t k = 1; k <= 4; ++k) {
      Matrix<cplx> m(k);
      for (auto& v : m.a) v = random_c(rng);
      CHECK(rel(determinant(m), cofactor_det(m)) < 1e-12);
    }
}
