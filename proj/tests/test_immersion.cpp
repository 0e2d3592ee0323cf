#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "capverify/common.hpp"
#include "capverify/immersion.hpp"
#include "capverify/operators.hpp"

using namespace capverify;
using namespace capverify::ambient;
using namespace capverify::immersion;

namespace {

// Independent 1-D quadrature oracle (composite Simpson, heavily refined).
double simpson(const std::function<double(double)>& f, double a, double b, int cells = 20000) {
  double s = 0.0;
  const double h = (b - a) / cells;
  for (int i = 0; i < cells; ++i) {
    const double x0 = a + i * h;
    s += (h / 6.0) * (f(x0) + 4.0 * f(x0 + 0.5 * h) + f(x0 + h));
  }
  return s;
}

double euclid_cap_area(int n, double radius, double theta) {
  if (n == 2) return 2.0 * kPi * radius * radius * (1.0 - std::cos(theta));
  return 2.0 * kPi * radius * radius * radius * (theta - std::sin(theta) * std::cos(theta));
}

double euclid_cap_boundary(int n, double radius, double theta) {
  const double rb = radius * std::sin(theta);
  if (n == 2) return 2.0 * kPi * rb;
  return 4.0 * kPi * rb * rb;
}

}  // namespace

TEST_CASE("unit hemisphere: area, boundary length, curvatures, frames") {
  SpaceForm eu = SpaceForm::euclidean_half_space(3);
  ParametricPatch cap = cap_family(eu, 2, 1.0, kPi / 2);
  DiscreteImmersion m = discretize(cap, 32);

  CHECK(m.area() == doctest::Approx(2.0 * kPi).epsilon(1e-8 / (2.0 * kPi)));
  CHECK(m.boundary_measure() == doctest::Approx(2.0 * kPi).epsilon(1e-8 / (2.0 * kPi)));

  for (const Node& node : m.nodes) {
    CHECK(std::abs(node.kappa[0] - 1.0) <= 1e-8);
    CHECK(std::abs(node.kappa[1] - 1.0) <= 1e-8);
    // frame orthonormality of the normal
    CHECK(std::abs(eu.inner(node.x, node.nu, node.nu) - 1.0) <= 1e-10);
    for (int i = 0; i < 2; ++i)
      CHECK(std::abs(eu.inner(node.x, node.nu, node.e[i])) <= 1e-10 * norm(node.e[i]));
  }
  for (const BoundaryNode& b : m.boundary) {
    CHECK(b.theta == doctest::Approx(kPi / 2).epsilon(1e-10));
    // theta = pi/2 makes the conormal coincide with the support normal
    CHECK(norm(b.mu - b.nbar) <= 1e-10);
  }
}

TEST_CASE("frame relations at the boundary") {
  for (double theta : {kPi / 3, kPi / 2, 2 * kPi / 3}) {
    for (int n : {2, 3}) {
      for (bool hyp : {false, true}) {
        SpaceForm space = hyp ? SpaceForm::hyperbolic_upper_half_space(n + 1)
                              : SpaceForm::euclidean_half_space(n + 1);
        DiscreteImmersion m = discretize(cap_family(space, n, 1.3, theta), 16);
        for (const BoundaryNode& b : m.boundary) {
          const double st = std::sin(b.theta), ct = std::cos(b.theta);
          CHECK(norm(b.mu - (st * b.nbar + ct * b.nubar)) <= 1e-10);
          CHECK(norm(b.nu - ((-ct) * b.nbar + st * b.nubar)) <= 1e-10);
          CHECK(std::abs(b.theta - theta) <= 1e-10);
        }
      }
    }
  }
}

TEST_CASE("frame orthonormality at interior nodes of the built-in families") {
  for (int n : {2, 3}) {
    for (bool hyp : {false, true}) {
      SpaceForm space = hyp ? SpaceForm::hyperbolic_upper_half_space(n + 1)
                            : SpaceForm::euclidean_half_space(n + 1);
      ParametricPatch base = cap_family(space, n, 1.0, kPi / 3);
      for (const ParametricPatch& patch : {base, perturbed_cap(base, 0.05, 2)}) {
        DiscreteImmersion m = discretize(patch, 12);
        for (const Node& nd : m.nodes) {
          CHECK(std::abs(space.inner(nd.x, nd.nu, nd.nu) - 1.0) <= 1e-10);
          for (int i = 0; i < n; ++i)
            CHECK(std::abs(space.inner(nd.x, nd.nu, nd.e[i])) <=
                  1e-10 * std::sqrt(space.inner(nd.x, nd.e[i], nd.e[i])));
          CHECK(nd.w > 0.0);
        }
      }
    }
  }
}

TEST_CASE("boundary second fundamental form relation against the support") {
  // h(e_a, e_b) = sin(theta) hhat(e_a, e_b) - kappa_supp cos(theta) g(e_a, e_b)
  // along the boundary, for boundary tangents e_a.
  for (int n : {2, 3}) {
    for (bool hyp : {false, true}) {
      SpaceForm space = hyp ? SpaceForm::hyperbolic_upper_half_space(n + 1)
                            : SpaceForm::euclidean_half_space(n + 1);
      for (double theta : {kPi / 3, 2 * kPi / 3}) {
        DiscreteImmersion m = discretize(cap_family(space, n, 1.0, theta), 16);
        const int nb = n - 1;
        for (const BoundaryNode& b : m.boundary) {
          const double st = std::sin(b.theta), ct = std::cos(b.theta);
          for (int a = 0; a < nb; ++a)
            for (int c = 0; c < nb; ++c) {
              const double lhs = b.h[(a + 1) * n + (c + 1)];
              const double rhs = st * b.hhat[a * nb + c] -
                                 space.support_curvature * ct * b.ghat[a * nb + c];
              CHECK(std::abs(lhs - rhs) <= 1e-9 * (1.0 + std::abs(rhs)));
            }
        }
      }
    }
  }
}

TEST_CASE("euclid cap theta=pi/3: center and boundary circle radius") {
  SpaceForm eu = SpaceForm::euclidean_half_space(3);
  ParametricPatch cap = cap_family(eu, 2, 1.0, kPi / 3);
  CHECK(cap.cap->center_height == doctest::Approx(-0.5));
  DiscreteImmersion m = discretize(cap, 16);
  for (const BoundaryNode& b : m.boundary) {
    CHECK(std::abs(b.x[2]) <= 1e-12);
    const double rb = std::hypot(b.x[0], b.x[1]);
    CHECK(rb == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-12));
  }
}

TEST_CASE("area convergence order at least 4") {
  SpaceForm eu = SpaceForm::euclidean_half_space(3);
  ParametricPatch cap = cap_family(eu, 2, 1.0, 2 * kPi / 3);
  const double exact = euclid_cap_area(2, 1.0, 2 * kPi / 3);
  const double exact_b = euclid_cap_boundary(2, 1.0, 2 * kPi / 3);
  double prev = 0.0, prev_b = 0.0;
  std::vector<double> errs, errs_b;
  for (int res : {12, 24, 48}) {
    DiscreteImmersion m = discretize(cap, res);
    errs.push_back(std::abs(m.area() - exact));
    errs_b.push_back(std::abs(m.boundary_measure() - exact_b));
  }
  (void)prev;
  (void)prev_b;
  CHECK(std::log2(errs[0] / errs[1]) >= 4.0);
  CHECK(std::log2(errs[1] / errs[2]) >= 4.0);
  // boundary rule is one dimension lower but same panel order
  CHECK(errs_b[2] <= 1e-10 * exact_b + 1e-14);
}

TEST_CASE("n=3 cap areas against closed forms") {
  SpaceForm eu = SpaceForm::euclidean_half_space(4);
  for (double theta : {kPi / 3, 2 * kPi / 3}) {
    ParametricPatch cap = cap_family(eu, 3, 0.8, theta);
    DiscreteImmersion m = discretize(cap, 16);
    const double exact = euclid_cap_area(3, 1.0 / 0.8, theta);
    const double exact_b = euclid_cap_boundary(3, 1.0 / 0.8, theta);
    CHECK(m.area() == doctest::Approx(exact).epsilon(1e-7));
    CHECK(m.boundary_measure() == doctest::Approx(exact_b).epsilon(1e-7));
  }
}

TEST_CASE("hyperbolic cap: umbilicity, contact angle, area oracle") {
  SpaceForm hy = SpaceForm::hyperbolic_upper_half_space(3);
  for (double theta : {kPi / 3, kPi / 2, 2 * kPi / 3}) {
    for (double lambda : {0.5, 1.0, 1.6}) {
      if (lambda + std::cos(theta) < 0.05) {
        CHECK_THROWS_AS(cap_family(hy, 2, lambda, theta), ConstructionError);
        continue;
      }
      ParametricPatch cap = cap_family(hy, 2, lambda, theta);
      const double rho = cap.cap->radius;
      const double ch = cap.cap->center_height;
      DiscreteImmersion m = discretize(cap, 64);

      double spread = 0.0;
      for (const Node& node : m.nodes) {
        spread = std::max(spread, std::abs(node.kappa[0] - lambda));
        spread = std::max(spread, std::abs(node.kappa[1] - lambda));
      }
      CHECK(spread <= 1e-8);

      for (const BoundaryNode& b : m.boundary) {
        CHECK(std::abs(b.theta - theta) <= 1e-10);
        CHECK(std::abs(b.x[2] - 1.0) <= 1e-12);
      }

      // area oracle by independent 1-D quadrature of the conformal density
      const double oracle = 2.0 * kPi * rho * rho *
                            simpson(
                                [&](double s) {
                                  const double h = ch + rho * std::cos(s);
                                  return std::sin(s) / (h * h);
                                },
                                0.0, theta);
      CHECK(m.area() == doctest::Approx(oracle).epsilon(3e-7));
    }
  }
}

TEST_CASE("hyperbolic caps with curvature above one lie on geodesic spheres") {
  // Independent route to the cap dictionary: a geodesic sphere of radius R
  // centered on the vertical axis at height h0 is the Euclidean sphere with
  // center h0 cosh(R) and radius h0 sinh(R), and its curvature is coth(R).
  SpaceForm hy = SpaceForm::hyperbolic_upper_half_space(3);
  for (double lambda : {1.3, 2.0}) {
    ParametricPatch cap = cap_family(hy, 2, lambda, kPi / 3);
    const double c = cap.cap->center_height, rho = cap.cap->radius;
    const double h0 = std::sqrt(c * c - rho * rho);
    const double radius_h = std::atanh(1.0 / lambda);  // acoth(lambda)
    CHECK(c == doctest::Approx(h0 * std::cosh(radius_h)).epsilon(1e-12));
    CHECK(rho == doctest::Approx(h0 * std::sinh(radius_h)).epsilon(1e-12));
    DiscreteImmersion m = discretize(cap, 16);
    for (const Node& nd : m.nodes) {
      const double dx = nd.x[0], dy = nd.x[1], dz = nd.x[2] - h0;
      const double coshd = 1.0 + (dx * dx + dy * dy + dz * dz) / (2.0 * nd.x[2] * h0);
      CHECK(std::acosh(coshd) == doctest::Approx(radius_h).epsilon(1e-11));
    }
  }
}

TEST_CASE("hyperbolic cap boundary is a flat round sphere in the horosphere") {
  SpaceForm hy = SpaceForm::hyperbolic_upper_half_space(3);
  for (double theta : {kPi / 3, 2 * kPi / 3}) {
    ParametricPatch cap = cap_family(hy, 2, 1.0, theta);
    DiscreteImmersion m = discretize(cap, 16);
    const double expected = 1.0 / (cap.cap->radius * std::sin(theta));
    for (const BoundaryNode& b : m.boundary)
      CHECK(b.kappa_hat[0] == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("hyperbolic cap n=3 sanity") {
  SpaceForm hy = SpaceForm::hyperbolic_upper_half_space(4);
  ParametricPatch cap = cap_family(hy, 3, 1.0, kPi / 3);
  DiscreteImmersion m = discretize(cap, 16);
  const double rho = cap.cap->radius, ch = cap.cap->center_height;
  double spread = 0.0;
  for (const Node& node : m.nodes)
    for (int i = 0; i < 3; ++i) spread = std::max(spread, std::abs(node.kappa[i] - 1.0));
  CHECK(spread <= 1e-7);
  const double oracle = 4.0 * kPi * rho * rho * rho *
                        simpson(
                            [&](double s) {
                              const double h = ch + rho * std::cos(s);
                              return std::sin(s) * std::sin(s) / (h * h * h);
                            },
                            0.0, kPi / 3);
  CHECK(m.area() == doctest::Approx(oracle).epsilon(1e-7));
}

TEST_CASE("principal direction property at the boundary") {
  for (int n : {2, 3}) {
    SpaceForm eu = SpaceForm::euclidean_half_space(n + 1);
    SpaceForm hy = SpaceForm::hyperbolic_upper_half_space(n + 1);
    for (const SpaceForm& space : {eu, hy}) {
      DiscreteImmersion m = discretize(cap_family(space, n, 1.0, kPi / 3), 16);
      for (const BoundaryNode& b : m.boundary) CHECK(b.max_h_e_mu <= 1e-9);
    }
  }
}

TEST_CASE("perturbed cap") {
  SpaceForm eu = SpaceForm::euclidean_half_space(3);
  ParametricPatch cap = cap_family(eu, 2, 1.0, kPi / 2);

  SUBCASE("zero amplitude leaves geometry unchanged") {
    ParametricPatch p = perturbed_cap(cap, 0.0, 2);
    DiscreteImmersion m0 = discretize(cap, 16);
    DiscreteImmersion m1 = discretize(p, 16);
    for (std::size_t i = 0; i < m0.nodes.size(); ++i)
      CHECK(norm(m0.nodes[i].x - m1.nodes[i].x) == 0.0);
  }

  SUBCASE("nonzero amplitude breaks umbilicity away from the boundary") {
    ParametricPatch p = perturbed_cap(cap, 0.05, 2);
    DiscreteImmersion m = discretize(p, 32);
    double spread = 0.0;
    for (const Node& node : m.nodes)
      spread = std::max(spread, std::abs(node.kappa[1] - node.kappa[0]));
    CHECK(spread > 1e-3);

    // boundary data unchanged: cutoff vanishes to second order there
    DiscreteImmersion base = discretize(cap, 32);
    for (std::size_t i = 0; i < m.boundary.size(); ++i) {
      CHECK(std::abs(m.boundary[i].theta - base.boundary[i].theta) <= 1e-10);
      CHECK(norm(m.boundary[i].x - base.boundary[i].x) <= 1e-12);
      CHECK(norm(m.boundary[i].mu - base.boundary[i].mu) <= 1e-10);
    }
  }

  SUBCASE("amplitude gate") {
    CHECK_THROWS_AS(perturbed_cap(cap, 0.2, 2), ConstructionError);
  }
}

TEST_CASE("integration symmetry and mismatch errors") {
  SpaceForm eu = SpaceForm::euclidean_half_space(3);
  DiscreteImmersion m = discretize(cap_family(eu, 2, 1.0, kPi / 2), 24);

  // odd azimuthal mode integrates to zero by symmetry
  SurfaceField odd = make_field(
      m, [](const Node& node) { return std::atan2(node.x[1], node.x[0]) < 0 ? -1.0 : 1.0; },
      nullptr);
  SurfaceField smooth_odd = make_field(
      m, [](const Node& node) { return node.x[0]; }, [](const BoundaryNode& b) { return b.x[0]; });
  CHECK(std::abs(integrate(m, smooth_odd)) <= 1e-10);
  CHECK(std::abs(integrate_boundary(m, smooth_odd)) <= 1e-10);
  (void)odd;

  std::vector<double> wrong(m.nodes.size() + 1, 1.0);
  CHECK_THROWS_AS(integrate(m, wrong), ArgumentError);
}

TEST_CASE("Gauss equation spot check") {
  // R_0101 from the metric (Christoffel derivatives) must match
  // K (g00 g11 - g01^2) + (h00 h11 - h01^2).
  for (bool hyp : {false, true}) {
    SpaceForm space = hyp ? SpaceForm::hyperbolic_upper_half_space(3)
                          : SpaceForm::euclidean_half_space(3);
    DiscreteImmersion m = discretize(cap_family(space, 2, 1.0, kPi / 3), 32);
    const int n = 2;
    auto gamma_entry = [&](int k, int i, int j) {
      std::vector<double> entry(m.nodes.size());
      for (std::size_t a = 0; a < m.nodes.size(); ++a)
        entry[a] = m.nodes[a].gamma[(k * n + i) * n + j];
      return entry;
    };
    // need d_0 Gamma^l_{11} and d_1 Gamma^l_{01} for l = 0, 1
    std::vector<double> dA[2], dB[2];
    for (int l = 0; l < 2; ++l) {
      dA[l] = m.differentiate(gamma_entry(l, 1, 1), 0, 1);
      dB[l] = m.differentiate(gamma_entry(l, 0, 1), 1, 1);
    }
    double worst = 0.0;
    for (std::size_t a = 0; a < m.nodes.size(); ++a) {
      const Node& nd = m.nodes[a];
      auto G = [&](int k, int i, int j) { return nd.gamma[(k * n + i) * n + j]; };
      double rl[2];
      for (int l = 0; l < 2; ++l) {
        rl[l] = dA[l][a] - dB[l][a];
        for (int mm = 0; mm < 2; ++mm)
          rl[l] += G(l, 0, mm) * G(mm, 1, 1) - G(l, 1, mm) * G(mm, 0, 1);
      }
      const double lhs = nd.g[0] * rl[0] + nd.g[1] * rl[1];  // g_{0l} R^l_{101}
      const double rhs = space.curvature * (nd.g[0] * nd.g[3] - nd.g[1] * nd.g[2]) +
                         (nd.h[0] * nd.h[3] - nd.h[1] * nd.h[2]);
      worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));
    }
    CHECK(worst <= 1e-5);
  }
}

TEST_CASE("restricted Newton entries match the full-tensor conormal component") {
  // P_r^{mumu} computed as sigma_r of the boundary-restricted curvatures
  // must equal the (mu,mu) component of the full Newton tensor, since mu is
  // a principal direction along the boundary.
  for (int n : {2, 3}) {
    for (bool hyp : {false, true}) {
      SpaceForm space = hyp ? SpaceForm::hyperbolic_upper_half_space(n + 1)
                            : SpaceForm::euclidean_half_space(n + 1);
      ParametricPatch patch = perturbed_cap(cap_family(space, n, 1.0, kPi / 3), 0.04, 2);
      DiscreteImmersion m = discretize(patch, 16);
      for (const BoundaryNode& b : m.boundary) {
        // assemble the boundary node's own Newton tensor from its h and g
        Node node;
        for (int k = 0; k < 9; ++k) {
          node.g[k] = b.g[k];
          node.h[k] = b.h[k];
        }
        double ginv[9];
        Mat gm(n, n), hm(n, n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            gm(i, j) = b.g[i * n + j];
            hm(i, j) = b.h[i * n + j];
          }
        Mat gi = inverse_spd(gm);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            node.ginv[i * n + j] = gi(i, j);
            ginv[i * n + j] = gi(i, j);
          }
        (void)ginv;
        const std::vector<double> kap =
            gen_sym_eigen(hm, gm, false).values;
        for (int i = 0; i < n; ++i) node.kappa[i] = kap[static_cast<std::size_t>(i)];
        const std::vector<double> sig = capverify::symfun::elementary_symmetric_all(kap);
        for (int k = 0; k <= n; ++k) node.sigma[k] = sig[static_cast<std::size_t>(k)];
        for (int r = 0; r < n; ++r) {
          double P[9];
          capverify::operators::newton_mixed(node, n, r, P);
          // (g P)(mu, mu) with mu given by its parameter components
          double entry = 0.0;
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
              for (int k = 0; k < n; ++k)
                entry += b.mu_comp[i] * b.g[i * n + k] * P[k * n + j] * b.mu_comp[j];
          const double restricted = newton_mu_mu(b, n, r);
          CHECK(std::abs(entry - restricted) <= 1e-8 * (1.0 + std::abs(restricted)));
        }
      }
    }
  }
}

TEST_CASE("scenario strings") {
  ParametricPatch a = patch_from_scenario("euclid-cap:n=2,lambda=1,theta=1.0472");
  CHECK(a.cap->lambda == doctest::Approx(1.0));
  ParametricPatch b = patch_from_scenario("horoball-cap:n=3,lambda=0.7,theta=1.5707963");
  CHECK(b.space.hyperbolic());
  ParametricPatch c = patch_from_scenario("perturbed:euclid-cap:n=2,lambda=1,theta=1.0472,amp=0.05,mode=2");
  CHECK(c.cap->perturbed);
  CHECK(c.cap->mode == 2);
  CHECK_THROWS_AS(patch_from_scenario("donut:n=2"), ArgumentError);
  CHECK_THROWS_AS(patch_from_scenario("euclid-cap:n=2,lambda=1"), ArgumentError);
}

TEST_CASE("finite-difference fallback matches analytic jets") {
  SpaceForm eu = SpaceForm::euclidean_half_space(3);
  ParametricPatch cap = cap_family(eu, 2, 1.0, kPi / 3);
  ParametricPatch fd = cap;
  fd.analytic_derivatives = false;
  fd.fd_step = 1e-3;
  DiscreteImmersion ma = discretize(cap, 12);
  DiscreteImmersion mf = discretize(fd, 12);
  for (std::size_t i = 0; i < ma.nodes.size(); ++i) {
    CHECK(norm(ma.nodes[i].nu - mf.nodes[i].nu) <= 1e-9);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(ma.nodes[i].h[k] - mf.nodes[i].h[k]) <= 1e-7);
  }
}

TEST_CASE("rebuild from positions reproduces the geometry") {
  // tolerances follow the measured truncation of the 8-point windows
  const double kappa_tol[2] = {2e-5, 5e-7};
  const double area_tol[2] = {1e-6, 1e-9};
  for (bool hyp : {false, true}) {
    SpaceForm space = hyp ? SpaceForm::hyperbolic_upper_half_space(3)
                          : SpaceForm::euclidean_half_space(3);
    int level = 0;
    for (int res : {32, 64}) {
      DiscreteImmersion m = discretize(cap_family(space, 2, 1.0, kPi / 3), res);
      std::vector<Vec> ipos(m.nodes.size()), bpos(m.boundary.size());
      for (std::size_t i = 0; i < ipos.size(); ++i) ipos[i] = m.nodes[i].x;
      for (std::size_t i = 0; i < bpos.size(); ++i) bpos[i] = m.boundary[i].x;
      DiscreteImmersion r = rebuild_from_positions(m, ipos, bpos);
      double worst_kappa = 0.0, worst_theta = 0.0;
      for (std::size_t i = 0; i < r.nodes.size(); ++i)
        worst_kappa = std::max(worst_kappa, std::abs(r.nodes[i].kappa[0] - m.nodes[i].kappa[0]));
      for (std::size_t i = 0; i < r.boundary.size(); ++i)
        worst_theta = std::max(worst_theta, std::abs(r.boundary[i].theta - m.boundary[i].theta));
      CHECK(worst_kappa <= kappa_tol[level]);
      CHECK(worst_theta <= 1e-9);
      CHECK(r.area() == doctest::Approx(m.area()).epsilon(area_tol[level]));
      ++level;
    }
  }
}
