#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "capverify/ambient.hpp"
#include "capverify/common.hpp"

using namespace capverify;
using namespace capverify::ambient;

namespace {

Vec random_hyperbolic_point(Rng& rng, int m) {
  Vec p(m);
  for (int i = 0; i < m - 1; ++i) p[i] = rng.uniform(-2.0, 2.0);
  p[m - 1] = rng.uniform(0.2, 3.0);
  return p;
}

Vec random_vector(Rng& rng, int m) {
  Vec v(m);
  for (int i = 0; i < m; ++i) v[i] = rng.uniform(-1.0, 1.0);
  return v;
}

}  // namespace

TEST_CASE("metric of the two models") {
  SpaceForm eu = SpaceForm::euclidean_half_space(3);
  Vec p(0.3, -1.0, 2.0);
  Mat ge = eu.metric_at(p);
  CHECK(ge(0, 0) == 1.0);
  CHECK(ge(1, 1) == 1.0);
  CHECK(ge(0, 1) == 0.0);

  SpaceForm hy = SpaceForm::hyperbolic_upper_half_space(3);
  Mat gh = hy.metric_at(p);  // height 2
  CHECK(gh(0, 0) == doctest::Approx(0.25));
  CHECK(gh(2, 2) == doctest::Approx(0.25));

  Vec ph(0.0, 0.0, 1.0);
  Mat g1 = hy.metric_at(ph);
  CHECK(g1(1, 1) == doctest::Approx(1.0));

  Vec bad(0.0, 0.0, -1.0);
  CHECK_THROWS_AS(hy.metric_at(bad), DomainError);
  CHECK((eu.tau() == 0.0 && hy.tau() == 0.0));
}

TEST_CASE("covariant derivative examples") {
  SpaceForm eu = SpaceForm::euclidean_half_space(3);
  SpaceForm hy = SpaceForm::hyperbolic_upper_half_space(3);
  Rng rng(42);

  // Euclidean: constant field has vanishing derivative.
  Vec p(0.5, 0.5, 1.3);
  FieldJet y{random_vector(rng, 3), Mat(3, 3)};
  FieldJet zconst{Vec(1.0, 2.0, -1.0), Mat(3, 3)};
  Vec de = covariant_derivative(eu, p, y, zconst);
  CHECK(norm(de) == doctest::Approx(0.0));

  for (int trial = 0; trial < 50; ++trial) {
    Vec q = random_hyperbolic_point(rng, 3);
    FieldJet yy{random_vector(rng, 3), Mat(3, 3)};

    // nabla_Y E_{n+1} = -(1/x_{n+1}) Y
    FieldJet ez = canonical_field_jet(hy, FieldTag::EVertical, q);
    Vec d1 = covariant_derivative(hy, q, yy, ez);
    Vec expected1 = (-1.0 / q[2]) * yy.value;
    CHECK(norm(d1 - expected1) <= 1e-12 * (1.0 + norm(expected1)));

    // nabla_Y x = -g(Y, Ebar_{n+1}) x + g(Y, x) Ebar_{n+1}
    FieldJet xj = canonical_field_jet(hy, FieldTag::Position, q);
    Vec d2 = covariant_derivative(hy, q, yy, xj);
    CanonicalFields cf = canonical_fields(hy, q);
    Vec ebar(3);
    for (int i = 0; i < 3; ++i) ebar[i] = cf.frame(i, 2);
    Vec expected2 = (-hy.inner(q, yy.value, ebar)) * q + hy.inner(q, yy.value, q) * ebar;
    CHECK(norm(d2 - expected2) <= 1e-12 * (1.0 + norm(expected2)));
  }
}

TEST_CASE("canonical fields") {
  SpaceForm hy = SpaceForm::hyperbolic_upper_half_space(4);
  Vec p(0.1, -0.2, 0.3, 2.0);
  CanonicalFields f = canonical_fields(hy, p);
  CHECK(f.potential == doctest::Approx(0.5));
  CHECK(f.x_shifted[3] == doctest::Approx(1.0));
  CHECK(f.x_shifted[0] == doctest::Approx(0.1));

  Vec at_e(0.0, 0.0, 0.0, 1.0);
  CanonicalFields fe = canonical_fields(hy, at_e);
  CHECK(norm(fe.x_shifted) == doctest::Approx(0.0));

  // frame orthonormality in the model metric
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Vec q = random_hyperbolic_point(rng, 4);
    CanonicalFields fq = canonical_fields(hy, q);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        Vec ea(4), eb(4);
        for (int i = 0; i < 4; ++i) {
          ea[i] = fq.frame(i, a);
          eb[i] = fq.frame(i, b);
        }
        CHECK(hy.inner(q, ea, eb) == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-12));
      }
  }
}

TEST_CASE("Killing defects at 100 random points") {
  SpaceForm hy = SpaceForm::hyperbolic_upper_half_space(4);
  Rng rng(314159);
  for (int trial = 0; trial < 100; ++trial) {
    Vec p = random_hyperbolic_point(rng, 4);
    Vec a = random_vector(rng, 4);
    Vec b = random_vector(rng, 4);
    CHECK(std::abs(killing_defect(hy, FieldTag::Position, p, a, b)) <= 1e-10);
    for (int i = 0; i < 3; ++i)
      CHECK(std::abs(killing_defect(hy, FieldTag::EHorizontal, p, a, b, i)) <= 1e-10);
    CHECK(std::abs(killing_defect(hy, FieldTag::EVertical, p, a, b)) <= 1e-10);
    CHECK(std::abs(killing_defect(hy, FieldTag::XShifted, p, a, b)) <= 1e-10);
  }

  // pinned example: conformal factor of E_{n+1} against -1/x_{n+1} at Ebar_1
  Vec p(0.0, 0.0, 0.0, 2.0);
  Vec ebar1(2.0, 0.0, 0.0, 0.0);
  CHECK(std::abs(killing_defect(hy, FieldTag::EVertical, p, ebar1, ebar1)) <= 1e-12);
  CHECK(std::abs(killing_defect(hy, FieldTag::XShifted, p, ebar1, ebar1)) <= 1e-12);
}

TEST_CASE("potential Hessian identity") {
  SpaceForm hy = SpaceForm::hyperbolic_upper_half_space(4);
  Rng rng(2718);
  for (int trial = 0; trial < 100; ++trial) {
    Vec p = random_hyperbolic_point(rng, 4);
    Vec a = random_vector(rng, 4);
    Vec b = random_vector(rng, 4);
    CHECK(std::abs(hessian_potential_residual(hy, p, a, b)) <= 1e-10);
  }

  Vec origin(0.0, 0.0, 0.0, 1.0);
  Vec ez(0.0, 0.0, 0.0, 1.0);
  CHECK(std::abs(hessian_potential_residual(hy, origin, ez, ez)) <= 1e-13);

  Vec p3(0.0, 0.0, 0.0, 3.0);
  Vec e1(3.0, 0.0, 0.0, 0.0);
  CHECK(std::abs(hessian_potential_residual(hy, p3, e1, e1)) <= 1e-13);
}

TEST_CASE("horosphere support relations") {
  SpaceForm hy = SpaceForm::hyperbolic_upper_half_space(3);
  Rng rng(1618);
  for (int trial = 0; trial < 100; ++trial) {
    Vec p(rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0), 1.0);
    CanonicalFields f = canonical_fields(hy, p);
    Vec nbar = hy.support_normal(p);
    CHECK(hy.inner(p, nbar, nbar) == doctest::Approx(1.0));
    // X_{n+1} is tangent to the horosphere.
    CHECK(std::abs(hy.inner(p, f.x_shifted, nbar)) <= 1e-12);
    // d/dN of V_{n+1} equals V_{n+1} on the horosphere:
    // flat gradient of V is -E_{n+1}/x^2, directional derivative along Nbar.
    const double dv = -nbar[2] / (p[2] * p[2]);
    CHECK(dv == doctest::Approx(f.potential).epsilon(1e-12));
  }
}
