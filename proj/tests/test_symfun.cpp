#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "capverify/common.hpp"
#include "capverify/symfun.hpp"

using namespace capverify;
using namespace capverify::symfun;

namespace {

// Independent oracle: brute-force enumeration of all r-subsets.
double sigma_by_enumeration(const std::vector<double>& kappa, int r) {
  const int n = int(kappa.size());
  if (r == 0) return 1.0;
  if (r > n) return 0.0;
  std::vector<int> idx(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) idx[std::size_t(i)] = i;
  double total = 0.0;
  while (true) {
    double prod = 1.0;
    for (int i : idx) prod *= kappa[std::size_t(i)];
    total += prod;
    int i = r - 1;
    while (i >= 0 && idx[std::size_t(i)] == n - r + i) --i;
    if (i < 0) break;
    ++idx[std::size_t(i)];
    for (int j = i + 1; j < r; ++j) idx[std::size_t(j)] = idx[std::size_t(j - 1)] + 1;
  }
  return total;
}

}  // namespace

TEST_CASE("elementary symmetric functions, pinned values") {
  CurvatureSpectrum ones({1, 1, 1, 1});
  CHECK(elementary_symmetric(ones, 2) == doctest::Approx(6.0).epsilon(1e-14));

  CurvatureSpectrum k123({1, 2, 3});
  CHECK(elementary_symmetric(k123, 2) == doctest::Approx(11.0).epsilon(1e-14));
  CHECK(elementary_symmetric(k123, 4) == 0.0);  // r > n convention
  CHECK(elementary_symmetric(k123, 0) == 1.0);
  CHECK_THROWS_AS(elementary_symmetric(k123, -1), ArgumentError);
}

TEST_CASE("elementary symmetric vs subset enumeration, 1000 random spectra") {
  Rng rng(20240501);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = rng.uniform_int(1, 6);
    std::vector<double> kappa(static_cast<std::size_t>(n));
    for (double& k : kappa) k = rng.uniform(-2.0, 2.0);
    CurvatureSpectrum spec(kappa);
    for (int r = 0; r <= n; ++r) {
      const double fast = elementary_symmetric(spec, r);
      const double slow = sigma_by_enumeration(kappa, r);
      CHECK(std::abs(fast - slow) <= 1e-12 * (1.0 + std::abs(slow)));
    }
  }
}

TEST_CASE("normalized mean curvature") {
  CurvatureSpectrum ones({1, 1, 1, 1, 1});
  for (int r = 0; r <= 5; ++r) CHECK(normalized_mean_curvature(ones, r) == doctest::Approx(1.0));

  CurvatureSpectrum k123({1, 2, 3});
  CHECK(normalized_mean_curvature(k123, 2) == doctest::Approx(11.0 / 3.0));
  CHECK(normalized_mean_curvature(k123, 0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(normalized_mean_curvature(k123, 4), ArgumentError);
}

TEST_CASE("newton tensor recursion, pinned diagonals") {
  ShapeOperator s = ShapeOperator::diagonal({1, 2, 3});

  NewtonTensor p0 = newton_tensor(s, 0);
  for (int i = 0; i < 3; ++i) CHECK(p0.matrix(i, i) == doctest::Approx(1.0));

  NewtonTensor p1 = newton_tensor(s, 1);
  CHECK(p1.matrix(0, 0) == doctest::Approx(5.0));
  CHECK(p1.matrix(1, 1) == doctest::Approx(4.0));
  CHECK(p1.matrix(2, 2) == doctest::Approx(3.0));

  NewtonTensor p2 = newton_tensor(s, 2);
  CHECK(p2.matrix(0, 0) == doctest::Approx(6.0));
  CHECK(p2.matrix(1, 1) == doctest::Approx(3.0));
  CHECK(p2.matrix(2, 2) == doctest::Approx(2.0));

  CHECK_THROWS_AS(newton_tensor(s, 3), ArgumentError);
  CHECK_THROWS_AS(newton_tensor(s, -1), ArgumentError);
}

TEST_CASE("newton tensor traces, pinned values") {
  ShapeOperator s123 = ShapeOperator::diagonal({1, 2, 3});
  NewtonTraces t = newton_traces(s123, 1);
  CHECK(t.tr_p == doctest::Approx(12.0));
  CHECK(t.tr_ph == doctest::Approx(22.0));
  CHECK(t.tr_ph2 == doctest::Approx(48.0));

  ShapeOperator s11 = ShapeOperator::diagonal({1, 1});
  NewtonTraces t0 = newton_traces(s11, 0);
  CHECK(t0.tr_p == doctest::Approx(2.0));
  CHECK(t0.tr_ph == doctest::Approx(2.0));
  CHECK(t0.tr_ph2 == doctest::Approx(2.0));

  // S = 2 I, n = 3, r = 1: sigma = (6, 12, 8); traces (2*6, 2*12, 6*12-3*8).
  ShapeOperator s2 = ShapeOperator::diagonal({2, 2, 2});
  NewtonTraces t2 = newton_traces(s2, 1);
  CHECK(t2.tr_p == doctest::Approx(12.0));
  CHECK(t2.tr_ph == doctest::Approx(24.0));
  CHECK(t2.tr_ph2 == doctest::Approx(48.0));
}

TEST_CASE("newton traces on random self-adjoint shapes") {
  Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.uniform_int(2, 5);
    // random SPD metric and random g-self-adjoint S = g^{-1} h
    Mat g(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= i; ++j) {
        g(i, j) = rng.uniform(-0.3, 0.3);
        g(j, i) = g(i, j);
      }
      g(i, i) += 1.5;
    }
    Mat h(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) {
        h(i, j) = rng.uniform(-1.5, 1.5);
        h(j, i) = h(i, j);
      }
    Mat s = inverse_spd(g) * h;
    ShapeOperator shape(s, g);
    for (int r = 0; r <= n - 1; ++r) CHECK_NOTHROW(newton_traces(shape, r));
    // Recursion closure: tr(P_{n-1} h) = n sigma_n.
    NewtonTraces t = newton_traces(shape, n - 1);
    const std::vector<double> sig = elementary_symmetric_all(shape.principal_curvatures());
    CHECK(std::abs(t.tr_ph - n * sig[std::size_t(n)]) <=
          1e-10 * (1.0 + std::abs(n * sig[std::size_t(n)])));
  }
}

TEST_CASE("sigma gradient") {
  ShapeOperator s = ShapeOperator::diagonal({1, 2, 3});
  Mat g2 = sigma_gradient(s, 2);
  CHECK(g2(0, 0) == doctest::Approx(5.0));
  CHECK(g2(1, 1) == doctest::Approx(4.0));
  CHECK(g2(2, 2) == doctest::Approx(3.0));

  Mat g1 = sigma_gradient(s, 1);
  for (int i = 0; i < 3; ++i) CHECK(g1(i, i) == doctest::Approx(1.0));

  ShapeOperator id = ShapeOperator::diagonal({1, 1, 1});
  Mat g3 = sigma_gradient(id, 3);
  for (int i = 0; i < 3; ++i) CHECK(g3(i, i) == doctest::Approx(1.0));
}

TEST_CASE("Garding cone membership") {
  CHECK(garding_cone_contains(CurvatureSpectrum({1, 2, 3}), 3));
  CHECK_FALSE(garding_cone_contains(CurvatureSpectrum({2, 2, -1}), 2));
  CHECK(garding_cone_contains(CurvatureSpectrum({1, 1, 1, 1}), 4));
  CHECK_THROWS_AS(garding_cone_contains(CurvatureSpectrum({1, 2}), 3), ArgumentError);
}

TEST_CASE("cone nesting: membership at l implies membership at l-1") {
  Rng rng(1234);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = rng.uniform_int(2, 6);
    std::vector<double> kappa(static_cast<std::size_t>(n));
    for (double& k : kappa) k = rng.uniform(-2.0, 2.0);
    CurvatureSpectrum spec(kappa);
    for (int l = n; l >= 2; --l)
      if (garding_cone_contains(spec, l)) CHECK(garding_cone_contains(spec, l - 1));
  }
}

TEST_CASE("Newton-MacLaurin gap") {
  CHECK(newton_maclaurin_gap(CurvatureSpectrum({1, 1, 1}), 1, 2) == doctest::Approx(0.0));
  CHECK(newton_maclaurin_gap(CurvatureSpectrum({1, 2, 3}), 1, 2) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  for (double c : {0.5, 2.0, 7.5}) {
    CHECK(std::abs(newton_maclaurin_gap(CurvatureSpectrum({c, c, c, c}), 2, 3)) <= 1e-13 * c * c);
  }
  CHECK_THROWS_AS(newton_maclaurin_gap(CurvatureSpectrum({-1, -1, -1}), 1, 2), PreconditionError);
  CHECK_THROWS_AS(newton_maclaurin_gap(CurvatureSpectrum({1, 2, 3}), 2, 2), ArgumentError);
}

TEST_CASE("Newton-MacLaurin nonnegativity over random cone spectra") {
  Rng rng(9876);
  int accepted = 0;
  while (accepted < 400) {
    const int n = rng.uniform_int(2, 6);
    std::vector<double> kappa(static_cast<std::size_t>(n));
    for (double& k : kappa) k = rng.uniform(-2.0, 2.0);
    CurvatureSpectrum spec(kappa);
    for (int l = 2; l <= n; ++l) {
      if (!garding_cone_contains(spec, l)) continue;
      for (int k = 1; k < l; ++k) CHECK(newton_maclaurin_gap(spec, k, l) >= -1e-12);
      ++accepted;
    }
  }
}

TEST_CASE("shape operator validation") {
  Mat bad(2, 2);
  bad(0, 1) = 1.0;  // not symmetric w.r.t. identity metric
  CHECK_THROWS_AS(ShapeOperator(bad, Mat::identity(2)), ArgumentError);

  Mat g(2, 2);
  g(0, 0) = 1.0;
  g(1, 1) = -1.0;
  CHECK_THROWS_AS(ShapeOperator(Mat::identity(2), g), ArgumentError);
}
