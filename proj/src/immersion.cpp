#include "capverify/immersion.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <sstream>

namespace capverify {
namespace immersion {

namespace {

using symfun::elementary_symmetric_all;

// Unit-sphere direction for the polar parametrizations used by the built-in
// families. n = 2: u = (s, phi); n = 3: u = (s, alpha, beta).
void sphere_direction(int n, const double* u, Vec& m, Vec m1[3], Vec m2[3][3]) {
  if (n == 2) {
    const double s = u[0], p = u[1];
    const double cs = std::cos(s), ss = std::sin(s), cp = std::cos(p), sp = std::sin(p);
    m = Vec(ss * cp, ss * sp, cs);
    m1[0] = Vec(cs * cp, cs * sp, -ss);
    m1[1] = Vec(-ss * sp, ss * cp, 0.0);
    m2[0][0] = Vec(-ss * cp, -ss * sp, -cs);
    m2[0][1] = Vec(-cs * sp, cs * cp, 0.0);
    m2[1][1] = Vec(-ss * cp, -ss * sp, 0.0);
  } else {
    const double s = u[0], a = u[1], b = u[2];
    const double cs = std::cos(s), ss = std::sin(s);
    const double ca = std::cos(a), sa = std::sin(a);
    const double cb = std::cos(b), sb = std::sin(b);
    const Vec w(sa * cb, sa * sb, ca);
    const Vec wa(ca * cb, ca * sb, -sa);
    const Vec wb(-sa * sb, sa * cb, 0.0);
    const Vec waa(-sa * cb, -sa * sb, -ca);
    const Vec wab(-ca * sb, ca * cb, 0.0);
    const Vec wbb(-sa * cb, -sa * sb, 0.0);
    auto lift = [](const Vec& h, double last) { return Vec(h[0], h[1], h[2], last); };
    m = lift(ss * w, cs);
    m1[0] = lift(cs * w, -ss);
    m1[1] = lift(ss * wa, 0.0);
    m1[2] = lift(ss * wb, 0.0);
    m2[0][0] = lift(-ss * w, -cs);
    m2[0][1] = lift(cs * wa, 0.0);
    m2[0][2] = lift(cs * wb, 0.0);
    m2[1][1] = lift(ss * waa, 0.0);
    m2[1][2] = lift(ss * wab, 0.0);
    m2[2][2] = lift(ss * wbb, 0.0);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) m2[i][j] = m2[j][i];
}

std::complex<double> ipow(std::complex<double> z, int k) {
  std::complex<double> r(1.0, 0.0);
  for (int i = 0; i < k; ++i) r *= z;
  return r;
}

double det_small(const double* g, int n) {
  if (n == 1) return g[0];
  if (n == 2) return g[0] * g[3] - g[1] * g[2];
  return g[0] * (g[4] * g[8] - g[5] * g[7]) - g[1] * (g[3] * g[8] - g[5] * g[6]) +
         g[2] * (g[3] * g[7] - g[4] * g[6]);
}

void invert_small(const double* g, int n, double* out) {
  const double d = det_small(g, n);
  if (n == 1) {
    out[0] = 1.0 / g[0];
    return;
  }
  if (n == 2) {
    out[0] = g[3] / d;
    out[1] = -g[1] / d;
    out[2] = -g[2] / d;
    out[3] = g[0] / d;
    return;
  }
  out[0] = (g[4] * g[8] - g[5] * g[7]) / d;
  out[1] = (g[2] * g[7] - g[1] * g[8]) / d;
  out[2] = (g[1] * g[5] - g[2] * g[4]) / d;
  out[3] = (g[5] * g[6] - g[3] * g[8]) / d;
  out[4] = (g[0] * g[8] - g[2] * g[6]) / d;
  out[5] = (g[2] * g[3] - g[0] * g[5]) / d;
  out[6] = (g[3] * g[7] - g[4] * g[6]) / d;
  out[7] = (g[1] * g[6] - g[0] * g[7]) / d;
  out[8] = (g[0] * g[4] - g[1] * g[3]) / d;
}

std::vector<double> small_gen_eigenvalues(const double* h, const double* g, int n) {
  Mat hm(n, n), gm(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      hm(i, j) = 0.5 * (h[i * n + j] + h[j * n + i]);
      gm(i, j) = 0.5 * (g[i * n + j] + g[j * n + i]);
    }
  return gen_sym_eigen(hm, gm, false).values;
}

PatchJet jet_by_finite_differences(const ParametricPatch& patch, const double* u) {
  PatchJet out;
  const int n = patch.n;
  const double h = patch.fd_step;
  out.x = patch.eval(u);
  auto shifted = [&](int d, double off) {
    double v[3] = {u[0], u[1], u[2]};
    v[d] += off;
    return patch.eval(v);
  };
  for (int d = 0; d < n; ++d) {
    const Vec p1 = shifted(d, h), p2 = shifted(d, 2 * h);
    const Vec n1 = shifted(d, -h), n2 = shifted(d, -2 * h);
    out.d1[d] = (1.0 / (12.0 * h)) * ((-1.0) * p2 + 8.0 * p1 - 8.0 * n1 + n2);
    out.d2[d][d] =
        (1.0 / (12.0 * h * h)) * ((-1.0) * p2 + 16.0 * p1 - 30.0 * out.x + 16.0 * n1 - n2);
  }
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      double v[3] = {u[0], u[1], u[2]};
      auto at = [&](double da, double db) {
        double q[3] = {v[0], v[1], v[2]};
        q[a] += da;
        q[b] += db;
        return patch.eval(q);
      };
      Vec mixed = (1.0 / (4.0 * h * h)) *
                  (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h));
      // fourth-order correction via Richardson with double step
      Vec mixed2 = (1.0 / (16.0 * h * h)) *
                   (at(2 * h, 2 * h) - at(2 * h, -2 * h) - at(-2 * h, 2 * h) + at(-2 * h, -2 * h));
      out.d2[a][b] = (1.0 / 3.0) * (4.0 * mixed - mixed2);
      out.d2[b][a] = out.d2[a][b];
    }
  return out;
}

PatchJet patch_jet(const ParametricPatch& patch, const double* u) {
  if (patch.analytic_derivatives) return patch.jet(u);
  return jet_by_finite_differences(patch, u);
}

std::string param_string(int n, const double* u) {
  char buf[128];
  if (n == 2) std::snprintf(buf, sizeof buf, "(%.6g, %.6g)", u[0], u[1]);
  else std::snprintf(buf, sizeof buf, "(%.6g, %.6g, %.6g)", u[0], u[1], u[2]);
  return buf;
}

// Geometry of one node from its jet. `weight` is the plain parameter-space
// quadrature weight; the area density is multiplied in here.
Node build_node(const SpaceForm& space, const PatchJet& jet, int n, double weight,
                const Vec& ref_dir, const std::string& where) {
  Node node;
  node.x = jet.x;
  space.validate_point(jet.x);
  const double conf = space.conformal_factor(jet.x);
  const int last = space.ambient_dim - 1;

  for (int i = 0; i < n; ++i) node.e[i] = jet.d1[i];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) node.g[i * n + j] = conf * dot(jet.d1[i], jet.d1[j]);
  const double detg = det_small(node.g, n);
  // Scale-free immersion guard: polar-chart determinants legitimately fall
  // toward zero near coordinate poles, so the gates compare against the
  // diagonal rather than using an absolute floor.
  double diag_prod = 1.0, diag_max = 0.0;
  for (int i = 0; i < n; ++i) {
    diag_prod *= node.g[i * n + i];
    diag_max = std::max(diag_max, node.g[i * n + i]);
  }
  for (int i = 0; i < n; ++i)
    if (!(node.g[i * n + i] > 1e-14 * diag_max))
      throw DiscretizationError("collapsed tangent direction at parameter point " + where);
  if (!(detg > 1e-12 * diag_prod))
    throw DiscretizationError("degenerate induced metric at parameter point " + where);
  node.sqrt_det_g = std::sqrt(detg);
  node.w = node.sqrt_det_g * weight;
  invert_small(node.g, n, node.ginv);

  Vec w = cross_complement(jet.d1, n);
  if (dot(w, ref_dir) < 0.0) w *= -1.0;
  node.nu = w * (1.0 / (std::sqrt(conf) * norm(w)));

  Vec dee[3][3];
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      dee[i][j] = jet.d2[i][j] + space.christoffel_term(jet.x, jet.d1[i], jet.d1[j]);
      dee[j][i] = dee[i][j];
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) node.h[i * n + j] = -conf * dot(dee[i][j], node.nu);

  const std::vector<double> kap = small_gen_eigenvalues(node.h, node.g, n);
  for (int i = 0; i < n; ++i) node.kappa[i] = kap[static_cast<std::size_t>(i)];
  const std::vector<double> sig = elementary_symmetric_all(kap);
  for (int r = 0; r <= n; ++r) node.sigma[r] = sig[static_cast<std::size_t>(r)];

  // d_k g_ij, exact from the jet; then the Christoffels of g.
  double dg[3][9];
  for (int k = 0; k < n; ++k) {
    const double dconf =
        space.hyperbolic() ? -2.0 * conf * jet.d1[k][last] / jet.x[last] : 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        dg[k][i * n + j] = dconf * dot(jet.d1[i], jet.d1[j]) +
                           conf * (dot(jet.d2[k][i], jet.d1[j]) + dot(jet.d1[i], jet.d2[k][j]));
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l)
          s += node.ginv[k * n + l] * (dg[i][l * n + j] + dg[j][l * n + i] - dg[l][i * n + j]);
        node.gamma[(k * n + i) * n + j] = 0.5 * s;
      }
  return node;
}

BoundaryNode build_boundary_node(const SpaceForm& space, const PatchJet& jet, int n,
                                 double weight, const Vec& ref_dir, const std::string& where) {
  const Node base = build_node(space, jet, n, 0.0, ref_dir, where);
  BoundaryNode b;
  b.x = base.x;
  for (int i = 0; i < n; ++i) b.e[i] = base.e[i];
  b.nu = base.nu;
  for (int i = 0; i < 9; ++i) {
    b.g[i] = base.g[i];
    b.h[i] = base.h[i];
  }
  const double conf = space.conformal_factor(jet.x);
  const int nb = n - 1;

  // boundary tangent metric and its inverse
  for (int a = 0; a < nb; ++a)
    for (int c = 0; c < nb; ++c) b.ghat[a * nb + c] = base.g[(a + 1) * n + (c + 1)];
  double ghat_inv[4];
  invert_small(b.ghat, nb, ghat_inv);

  // outward conormal: e_0 made orthogonal to the boundary tangents
  double coef[2] = {0.0, 0.0};
  for (int a = 0; a < nb; ++a)
    for (int c = 0; c < nb; ++c) coef[a] += ghat_inv[a * nb + c] * base.g[0 * n + (c + 1)];
  Vec v = jet.d1[0];
  for (int a = 0; a < nb; ++a) v -= coef[a] * jet.d1[a + 1];
  const double vnorm = std::sqrt(conf * dot(v, v));
  b.mu = v * (1.0 / vnorm);
  b.mu_comp[0] = 1.0 / vnorm;
  for (int a = 0; a < nb; ++a) b.mu_comp[a + 1] = -coef[a] / vnorm;
  for (int i = n; i < 3; ++i) b.mu_comp[i] = 0.0;

  b.nbar = space.support_normal(jet.x);
  const double cost = -space.inner(jet.x, b.nu, b.nbar);
  const double sint = space.inner(jet.x, b.mu, b.nbar);
  b.theta = std::atan2(sint, cost);
  b.nubar = cost * b.mu + sint * b.nu;

  b.h_mumu = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b.h_mumu += base.h[i * n + j] * b.mu_comp[i] * b.mu_comp[j];

  // restriction of h to the boundary tangent plane
  double hres[4];
  for (int a = 0; a < nb; ++a)
    for (int c = 0; c < nb; ++c) hres[a * nb + c] = base.h[(a + 1) * n + (c + 1)];
  const std::vector<double> kr = small_gen_eigenvalues(hres, b.ghat, nb);
  for (int a = 0; a < nb; ++a) b.kappa_res[a] = kr[static_cast<std::size_t>(a)];
  for (int a = nb; a < 2; ++a) b.kappa_res[a] = 0.0;

  b.max_h_e_mu = 0.0;
  for (int a = 0; a < nb; ++a) {
    double hem = 0.0;
    for (int j = 0; j < n; ++j) hem += base.h[(a + 1) * n + j] * b.mu_comp[j];
    b.max_h_e_mu = std::max(b.max_h_e_mu, std::abs(hem) / std::sqrt(b.ghat[a * nb + a]));
  }

  // second fundamental form of the boundary inside the support
  for (int a = 0; a < nb; ++a)
    for (int c = 0; c < nb; ++c) {
      const Vec dee = jet.d2[a + 1][c + 1] +
                      space.christoffel_term(jet.x, jet.d1[a + 1], jet.d1[c + 1]);
      b.hhat[a * nb + c] = -conf * dot(dee, b.nubar);
    }
  const std::vector<double> kh = small_gen_eigenvalues(b.hhat, b.ghat, nb);
  for (int a = 0; a < nb; ++a) b.kappa_hat[a] = kh[static_cast<std::size_t>(a)];
  for (int a = nb; a < 2; ++a) b.kappa_hat[a] = 0.0;

  const double detghat = det_small(b.ghat, nb);
  if (!(detghat > 1e-14))
    throw DiscretizationError("degenerate boundary metric at parameter point " + where);
  b.w = std::sqrt(detghat) * weight;
  return b;
}

}  // namespace

double DiscreteImmersion::theta() const {
  if (boundary.empty()) throw ArgumentError("theta: immersion has no boundary");
  double s = 0.0;
  for (const BoundaryNode& b : boundary) s += b.theta;
  return s / double(boundary.size());
}

double DiscreteImmersion::area() const {
  std::vector<double> w(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) w[i] = nodes[i].w;
  return pairwise_sum(w);
}

double DiscreteImmersion::boundary_measure() const {
  std::vector<double> w(boundary.size());
  for (std::size_t i = 0; i < boundary.size(); ++i) w[i] = boundary[i].w;
  return pairwise_sum(w);
}

void DiscreteImmersion::node_params(int flat, double* u) const {
  int rem = flat;
  for (int d = n - 1; d >= 0; --d) {
    u[d] = grids[d].nodes()[static_cast<std::size_t>(rem % shape.size[d])];
    rem /= shape.size[d];
  }
}

void DiscreteImmersion::boundary_params(int flat, double* u) const {
  int rem = flat;
  for (int d = n - 1; d >= 1; --d) {
    u[d] = grids[d].nodes()[static_cast<std::size_t>(rem % shape.size[d])];
    rem /= shape.size[d];
  }
  u[0] = grids[0].b();
}

std::vector<double> DiscreteImmersion::differentiate(const std::vector<double>& values, int d,
                                                     int order) const {
  if (int(values.size()) != shape.total())
    throw ArgumentError("differentiate: value count does not match the node set");
  return tensor_differentiate(shape, grids, values, d, order);
}

std::vector<double> DiscreteImmersion::boundary_differentiate(const std::vector<double>& values,
                                                              int d, int order) const {
  if (int(values.size()) != boundary_shape.total())
    throw ArgumentError("boundary_differentiate: value count does not match the boundary set");
  return tensor_differentiate(boundary_shape, grids + 1, values, d - 1, order);
}

std::vector<double> DiscreteImmersion::boundary_d0(const std::vector<double>& interior,
                                                   const std::vector<double>& bvals,
                                                   int order) const {
  if (int(interior.size()) != shape.total() || int(bvals.size()) != boundary_shape.total())
    throw ArgumentError("boundary_d0: value counts do not match the node sets");
  std::vector<double> out(bvals.size());
  const int stride = shape.stride(0);
  for (int j = 0; j < boundary_shape.total(); ++j)
    out[static_cast<std::size_t>(j)] =
        grids[0].end_derivative(interior.data() + j, stride, bvals[static_cast<std::size_t>(j)], order);
  return out;
}

std::vector<double> DiscreteImmersion::boundary_interpolate(
    const std::vector<double>& interior) const {
  std::vector<double> out(static_cast<std::size_t>(boundary_shape.total()));
  const int stride = shape.stride(0);
  for (int j = 0; j < boundary_shape.total(); ++j)
    out[static_cast<std::size_t>(j)] = grids[0].end_value(interior.data() + j, stride);
  return out;
}

SurfaceField make_field(const DiscreteImmersion& m,
                        const std::function<double(const Node&)>& f,
                        const std::function<double(const BoundaryNode&)>& fb) {
  SurfaceField out;
  out.interior.resize(m.nodes.size());
  for (std::size_t i = 0; i < m.nodes.size(); ++i) out.interior[i] = f(m.nodes[i]);
  if (fb && m.has_boundary()) {
    out.boundary.resize(m.boundary.size());
    for (std::size_t i = 0; i < m.boundary.size(); ++i) out.boundary[i] = fb(m.boundary[i]);
  }
  return out;
}

double integrate(const DiscreteImmersion& m, const std::vector<double>& interior_values) {
  if (interior_values.size() != m.nodes.size())
    throw ArgumentError("integrate: value count does not match the node set");
  std::vector<double> terms(interior_values.size());
  for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = interior_values[i] * m.nodes[i].w;
  return pairwise_sum(terms);
}

double integrate(const DiscreteImmersion& m, const SurfaceField& f) {
  return integrate(m, f.interior);
}

double integrate_boundary(const DiscreteImmersion& m, const std::vector<double>& bvalues) {
  if (bvalues.size() != m.boundary.size())
    throw ArgumentError("integrate_boundary: value count does not match the boundary set");
  std::vector<double> terms(bvalues.size());
  for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = bvalues[i] * m.boundary[i].w;
  return pairwise_sum(terms);
}

double integrate_boundary(const DiscreteImmersion& m, const SurfaceField& f) {
  return integrate_boundary(m, f.boundary);
}

DiscreteImmersion discretize(const ParametricPatch& patch, int resolution) {
  if (resolution < 8) throw ArgumentError("discretize: resolution must be at least 8");
  const int n = patch.n;
  DiscreteImmersion m;
  m.space = patch.space;
  m.n = n;
  m.resolution = resolution;
  m.cap = patch.cap;
  m.description = patch.description;
  const int panels = std::max(2, resolution / 3);
  m.shape.dim = n;
  for (int d = 0; d < n; ++d) {
    m.grids[d] = Grid1D(patch.lo[d], patch.hi[d], panels, patch.periodic[d]);
    m.shape.size[d] = m.grids[d].size();
  }
  m.boundary_shape.dim = n - 1;
  for (int d = 1; d < n; ++d) m.boundary_shape.size[d - 1] = m.shape.size[d];

  m.nodes.reserve(static_cast<std::size_t>(m.shape.total()));
  int idx[3] = {0, 0, 0};
  for (int flat = 0; flat < m.shape.total(); ++flat) {
    int rem = flat;
    for (int d = n - 1; d >= 0; --d) {
      idx[d] = rem % m.shape.size[d];
      rem /= m.shape.size[d];
    }
    double u[3] = {0, 0, 0};
    double weight = 1.0;
    for (int d = 0; d < n; ++d) {
      u[d] = m.grids[d].nodes()[static_cast<std::size_t>(idx[d])];
      weight *= m.grids[d].weights()[static_cast<std::size_t>(idx[d])];
    }
    const PatchJet jet = patch_jet(patch, u);
    const Vec ref = patch.normal_ref ? patch.normal_ref(u) : cross_complement(jet.d1, n);
    m.nodes.push_back(build_node(patch.space, jet, n, weight, ref, param_string(n, u)));
  }

  if (patch.has_boundary) {
    m.boundary.reserve(static_cast<std::size_t>(m.boundary_shape.total()));
    for (int flat = 0; flat < m.boundary_shape.total(); ++flat) {
      int rem = flat;
      int bidx[3] = {0, 0, 0};
      for (int d = n - 2; d >= 0; --d) {
        bidx[d] = rem % m.boundary_shape.size[d];
        rem /= m.boundary_shape.size[d];
      }
      double u[3] = {0, 0, 0};
      double weight = 1.0;
      u[0] = patch.hi[0];
      for (int d = 1; d < n; ++d) {
        u[d] = m.grids[d].nodes()[static_cast<std::size_t>(bidx[d - 1])];
        weight *= m.grids[d].weights()[static_cast<std::size_t>(bidx[d - 1])];
      }
      const PatchJet jet = patch_jet(patch, u);
      const int last = patch.space.ambient_dim - 1;
      if (std::abs(jet.x[last] - patch.space.support_height) > 1e-10)
        throw ConstructionError("boundary edge does not lie on the support hypersurface");
      const Vec ref = patch.normal_ref ? patch.normal_ref(u) : cross_complement(jet.d1, n);
      m.boundary.push_back(
          build_boundary_node(patch.space, jet, n, weight, ref, param_string(n, u)));
    }
  }
  return m;
}

ParametricPatch cap_family(const SpaceForm& space, int n, double lambda, double theta) {
  if (n != 2 && n != 3) throw ArgumentError("cap_family: n must be 2 or 3");
  if (space.ambient_dim != n + 1) throw ArgumentError("cap_family: space dimension mismatch");
  if (!(theta > 0.0 && theta < kPi)) throw ConstructionError("cap_family: theta outside (0, pi)");

  double radius = 0.0, center_h = 0.0;
  if (space.hyperbolic()) {
    if (lambda < 0.0) throw ConstructionError("cap_family: hyperbolic curvature must be >= 0");
    const double denom = lambda + std::cos(theta);
    if (!(denom > 1e-12))
      throw ConstructionError("cap_family: (lambda, theta) gives no cap meeting the horosphere");
    radius = 1.0 / denom;
    center_h = 1.0 - radius * std::cos(theta);  // equals lambda * radius
  } else {
    if (!(lambda > 0.0)) throw ConstructionError("cap_family: Euclidean curvature must be > 0");
    radius = 1.0 / lambda;
    center_h = -std::cos(theta) / lambda;
  }

  ParametricPatch p;
  p.n = n;
  p.space = space;
  p.lo[0] = 0.0;
  p.hi[0] = theta;  // boundary polar angle equals the contact angle
  p.lo[1] = 0.0;
  p.hi[1] = (n == 2) ? 2.0 * kPi : kPi;
  p.lo[2] = 0.0;
  p.hi[2] = 2.0 * kPi;
  p.periodic[0] = false;
  p.periodic[1] = (n == 2);  // azimuthal for n = 2; colatitude otherwise
  p.periodic[2] = true;
  p.has_boundary = true;
  p.analytic_derivatives = true;
  p.cap = CapInfo{lambda, theta, radius, center_h, false, 0.0, 0};
  {
    std::ostringstream os;
    os << (space.hyperbolic() ? "horoball-cap" : "euclid-cap") << ":n=" << n
       << ",lambda=" << lambda << ",theta=" << theta;
    p.description = os.str();
  }

  const int nn = n;
  const double rr = radius, ch = center_h;
  p.jet = [nn, rr, ch](const double* u) {
    PatchJet out;
    Vec m, m1[3], m2[3][3];
    sphere_direction(nn, u, m, m1, m2);
    out.x = rr * m;
    out.x[nn] += ch;
    for (int i = 0; i < nn; ++i) out.d1[i] = rr * m1[i];
    for (int i = 0; i < nn; ++i)
      for (int j = 0; j < nn; ++j) out.d2[i][j] = rr * m2[i][j];
    return out;
  };
  p.eval = [jet = p.jet](const double* u) { return jet(u).x; };
  p.normal_ref = [nn](const double* u) {
    Vec m, m1[3], m2[3][3];
    sphere_direction(nn, u, m, m1, m2);
    return m;
  };
  return p;
}

ParametricPatch perturbed_cap(const ParametricPatch& cap, double amplitude, int mode) {
  if (!cap.cap) throw ArgumentError("perturbed_cap: base patch is not a cap");
  if (mode < 0) throw ArgumentError("perturbed_cap: mode must be nonnegative");
  const CapInfo info = *cap.cap;
  if (std::abs(amplitude) > 0.1 * info.radius + 1e-15)
    throw ConstructionError("perturbed_cap: amplitude exceeds a tenth of the cap radius");

  ParametricPatch p = cap;
  p.cap->perturbed = true;
  p.cap->amplitude = amplitude;
  p.cap->mode = mode;
  {
    std::ostringstream os;
    os << "perturbed:" << cap.description << ",amp=" << amplitude << ",mode=" << mode;
    p.description = os.str();
  }

  const int nn = cap.n;
  const bool hyp = cap.space.hyperbolic();
  const double rr = info.radius, ch = info.center_height, smax = cap.hi[0];
  p.jet = [nn, hyp, rr, ch, smax, amplitude, mode](const double* u) {
    Vec m, m1[3], m2[3][3];
    sphere_direction(nn, u, m, m1, m2);

    PatchJet base;
    base.x = rr * m;
    base.x[nn] += ch;
    for (int i = 0; i < nn; ++i) base.d1[i] = rr * m1[i];
    for (int i = 0; i < nn; ++i)
      for (int j = 0; j < nn; ++j) base.d2[i][j] = rr * m2[i][j];

    // cutoff in the polar parameter: 1 at the pole, vanishing to second
    // order at the boundary edge
    const double t = u[0] / smax;
    const double chi = (1.0 - t * t) * (1.0 - t * t);
    const double dchi = -4.0 * t * (1.0 - t * t) / smax;
    const double d2chi = (-4.0 + 12.0 * t * t) / (smax * smax);

    // angular profile: real part of (m_0 + i m_1)^mode
    const std::complex<double> i1(0.0, 1.0);
    std::complex<double> z(m[0], m[1]);
    std::complex<double> dz[3], d2z[3][3];
    for (int a = 0; a < nn; ++a) dz[a] = m1[a][0] + i1 * m1[a][1];
    for (int a = 0; a < nn; ++a)
      for (int b = 0; b < nn; ++b) d2z[a][b] = m2[a][b][0] + i1 * m2[a][b][1];
    const std::complex<double> zm = ipow(z, mode);
    const std::complex<double> zm1 = (mode >= 1) ? ipow(z, mode - 1) : 0.0;
    const std::complex<double> zm2 = (mode >= 2) ? ipow(z, mode - 2) : 0.0;
    const double y = zm.real();
    double dy[3] = {0, 0, 0}, d2y[3][3] = {{0}};
    for (int a = 0; a < nn; ++a) dy[a] = (double(mode) * zm1 * dz[a]).real();
    for (int a = 0; a < nn; ++a)
      for (int b = 0; b < nn; ++b)
        d2y[a][b] = (double(mode) * (double(mode - 1) * zm2 * dz[a] * dz[b] + zm1 * d2z[a][b]))
                        .real();

    // scalar graph height p = amplitude * chi(s) * y(u)
    double pval = amplitude * chi * y;
    double dp[3], d2p[3][3];
    for (int a = 0; a < nn; ++a) dp[a] = amplitude * ((a == 0 ? dchi * y : 0.0) + chi * dy[a]);
    for (int a = 0; a < nn; ++a)
      for (int b = 0; b < nn; ++b) {
        double v = chi * d2y[a][b];
        if (a == 0) v += dchi * dy[b];
        if (b == 0) v += dchi * dy[a];
        if (a == 0 && b == 0) v += d2chi * y;
        d2p[a][b] = amplitude * v;
      }

    // direction of the base normal: m (Euclidean), x_{n+1} m (hyperbolic)
    Vec nd = m, dnd[3], d2nd[3][3];
    for (int a = 0; a < nn; ++a) dnd[a] = m1[a];
    for (int a = 0; a < nn; ++a)
      for (int b = 0; b < nn; ++b) d2nd[a][b] = m2[a][b];
    if (hyp) {
      const double xl = base.x[nn];
      double dxl[3], d2xl[3][3];
      for (int a = 0; a < nn; ++a) dxl[a] = rr * m1[a][nn];
      for (int a = 0; a < nn; ++a)
        for (int b = 0; b < nn; ++b) d2xl[a][b] = rr * m2[a][b][nn];
      for (int a = 0; a < nn; ++a)
        for (int b = 0; b < nn; ++b)
          d2nd[a][b] = xl * m2[a][b] + dxl[a] * m1[b] + dxl[b] * m1[a] + d2xl[a][b] * m;
      for (int a = 0; a < nn; ++a) dnd[a] = xl * m1[a] + dxl[a] * m;
      nd = xl * m;
    }

    PatchJet out = base;
    out.x += pval * nd;
    for (int a = 0; a < nn; ++a) out.d1[a] += dp[a] * nd + pval * dnd[a];
    for (int a = 0; a < nn; ++a)
      for (int b = 0; b < nn; ++b)
        out.d2[a][b] += d2p[a][b] * nd + dp[a] * dnd[b] + dp[b] * dnd[a] + pval * d2nd[a][b];
    return out;
  };
  p.eval = [jet = p.jet](const double* u) { return jet(u).x; };
  return p;
}

ParametricPatch closed_sphere(int n, double lambda) {
  if (!(lambda > 0.0)) throw ConstructionError("closed_sphere: curvature must be positive");
  SpaceForm space = SpaceForm::euclidean_half_space(n + 1);
  ParametricPatch p = cap_family(space, n, lambda, kPi / 2);
  p.hi[0] = kPi;
  p.has_boundary = false;
  const double radius = 1.0 / lambda;
  const double center_h = 2.0 * radius;  // keep the sphere inside the half-space
  p.cap = CapInfo{lambda, 0.0, radius, center_h, false, 0.0, 0};
  {
    std::ostringstream os;
    os << "closed-sphere:n=" << n << ",lambda=" << lambda;
    p.description = os.str();
  }
  const int nn = n;
  p.jet = [nn, radius, center_h](const double* u) {
    PatchJet out;
    Vec m, m1[3], m2[3][3];
    sphere_direction(nn, u, m, m1, m2);
    out.x = radius * m;
    out.x[nn] += center_h;
    for (int i = 0; i < nn; ++i) out.d1[i] = radius * m1[i];
    for (int i = 0; i < nn; ++i)
      for (int j = 0; j < nn; ++j) out.d2[i][j] = radius * m2[i][j];
    return out;
  };
  p.eval = [jet = p.jet](const double* u) { return jet(u).x; };
  return p;
}

ParametricPatch patch_from_scenario(const std::string& scenario) {
  std::string rest = scenario;
  bool perturbed = false;
  if (rest.rfind("perturbed:", 0) == 0) {
    perturbed = true;
    rest = rest.substr(10);
  }
  const std::size_t colon = rest.find(':');
  if (colon == std::string::npos) throw ArgumentError("scenario: missing ':' in " + scenario);
  const std::string kind = rest.substr(0, colon);
  std::map<std::string, double> kv;
  std::stringstream ss(rest.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos) throw ArgumentError("scenario: bad key=value item " + item);
    kv[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
  }
  auto get = [&](const std::string& key, double fallback, bool required) {
    auto it = kv.find(key);
    if (it == kv.end()) {
      if (required) throw ArgumentError("scenario: missing key " + key);
      return fallback;
    }
    return it->second;
  };
  const int n = int(get("n", 2, true));
  ParametricPatch base;
  if (kind == "euclid-cap")
    base = cap_family(SpaceForm::euclidean_half_space(n + 1), n, get("lambda", 1, true),
                      get("theta", 0, true));
  else if (kind == "horoball-cap")
    base = cap_family(SpaceForm::hyperbolic_upper_half_space(n + 1), n, get("lambda", 1, true),
                      get("theta", 0, true));
  else if (kind == "closed-sphere")
    base = closed_sphere(n, get("lambda", 1, true));
  else
    throw ArgumentError("scenario: unknown family " + kind);
  if (perturbed)
    return perturbed_cap(base, get("amp", 0.0, true), int(get("mode", 2, false)));
  return base;
}

double inner_x_nu(const SpaceForm& s, const Node& node) {
  return s.conformal_factor(node.x) * dot(node.x, node.nu);
}
double inner_E_nu(const SpaceForm& s, const Node& node) {
  return s.conformal_factor(node.x) * node.nu[s.ambient_dim - 1];
}
double inner_X_nu(const SpaceForm& s, const Node& node) {
  return s.conformal_factor(node.x) * (dot(node.x, node.nu) - node.nu[s.ambient_dim - 1]);
}
double potential(const SpaceForm& s, const Node& node) {
  return s.hyperbolic() ? 1.0 / node.x[s.ambient_dim - 1] : 0.0;
}
double inner_x_nu_b(const SpaceForm& s, const BoundaryNode& node) {
  return s.conformal_factor(node.x) * dot(node.x, node.nu);
}
double inner_E_nu_b(const SpaceForm& s, const BoundaryNode& node) {
  return s.conformal_factor(node.x) * node.nu[s.ambient_dim - 1];
}
double inner_X_nu_b(const SpaceForm& s, const BoundaryNode& node) {
  return s.conformal_factor(node.x) * (dot(node.x, node.nu) - node.nu[s.ambient_dim - 1]);
}
double potential_b(const SpaceForm& s, const BoundaryNode& node) {
  return s.hyperbolic() ? 1.0 / node.x[s.ambient_dim - 1] : 0.0;
}
double inner_x_nubar_b(const SpaceForm& s, const BoundaryNode& node) {
  return s.conformal_factor(node.x) * dot(node.x, node.nubar);
}
double inner_x_mu_b(const SpaceForm& s, const BoundaryNode& node) {
  return s.conformal_factor(node.x) * dot(node.x, node.mu);
}

double newton_mu_mu(const BoundaryNode& node, int n, int r) {
  if (r < 0 || r > n - 1) throw ArgumentError("newton_mu_mu: need 0 <= r <= n-1");
  std::vector<double> kr(node.kappa_res, node.kappa_res + (n - 1));
  return elementary_symmetric_all(kr)[static_cast<std::size_t>(r)];
}

double boundary_sigma(const BoundaryNode& node, int n, int l) {
  if (l < 0 || l > n - 1) throw ArgumentError("boundary_sigma: need 0 <= l <= n-1");
  std::vector<double> kh(node.kappa_hat, node.kappa_hat + (n - 1));
  return elementary_symmetric_all(kh)[static_cast<std::size_t>(l)];
}

DiscreteImmersion rebuild_from_positions(const DiscreteImmersion& ref,
                                         const std::vector<Vec>& interior_pos,
                                         const std::vector<Vec>& boundary_pos) {
  if (interior_pos.size() != ref.nodes.size() || boundary_pos.size() != ref.boundary.size())
    throw ArgumentError("rebuild_from_positions: position counts do not match the node sets");
  const int n = ref.n;
  const int amb = ref.space.ambient_dim;
  const int total = ref.shape.total();

  // per-component arrays
  std::vector<std::vector<double>> comp(static_cast<std::size_t>(amb));
  for (int c = 0; c < amb; ++c) {
    comp[static_cast<std::size_t>(c)].resize(static_cast<std::size_t>(total));
    for (int i = 0; i < total; ++i)
      comp[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)] = interior_pos[static_cast<std::size_t>(i)][c];
  }
  std::vector<std::vector<double>> d1(static_cast<std::size_t>(amb * n));
  std::vector<std::vector<double>> d2(static_cast<std::size_t>(amb * n * n));
  for (int c = 0; c < amb; ++c) {
    for (int a = 0; a < n; ++a) {
      d1[static_cast<std::size_t>(c * n + a)] = ref.differentiate(comp[static_cast<std::size_t>(c)], a, 1);
      d2[static_cast<std::size_t>((c * n + a) * n + a)] =
          ref.differentiate(comp[static_cast<std::size_t>(c)], a, 2);
      for (int b = a + 1; b < n; ++b) {
        d2[static_cast<std::size_t>((c * n + a) * n + b)] =
            ref.differentiate(d1[static_cast<std::size_t>(c * n + a)], b, 1);
        d2[static_cast<std::size_t>((c * n + b) * n + a)] =
            d2[static_cast<std::size_t>((c * n + a) * n + b)];
      }
    }
  }

  DiscreteImmersion out = ref;  // reuse layout, grids, metadata
  for (int i = 0; i < total; ++i) {
    PatchJet jet;
    jet.x = interior_pos[static_cast<std::size_t>(i)];
    for (int a = 0; a < n; ++a) {
      jet.d1[a] = Vec(amb);
      for (int c = 0; c < amb; ++c)
        jet.d1[a][c] = d1[static_cast<std::size_t>(c * n + a)][static_cast<std::size_t>(i)];
      for (int b = 0; b < n; ++b) {
        jet.d2[a][b] = Vec(amb);
        for (int c = 0; c < amb; ++c)
          jet.d2[a][b][c] = d2[static_cast<std::size_t>((c * n + a) * n + b)][static_cast<std::size_t>(i)];
      }
    }
    const double weight = ref.nodes[static_cast<std::size_t>(i)].w /
                          ref.nodes[static_cast<std::size_t>(i)].sqrt_det_g;
    out.nodes[static_cast<std::size_t>(i)] = build_node(
        ref.space, jet, n, weight, ref.nodes[static_cast<std::size_t>(i)].nu, "rebuilt node");
  }

  if (ref.has_boundary()) {
    const int btotal = ref.boundary_shape.total();
    std::vector<std::vector<double>> bcomp(static_cast<std::size_t>(amb));
    for (int c = 0; c < amb; ++c) {
      bcomp[static_cast<std::size_t>(c)].resize(static_cast<std::size_t>(btotal));
      for (int i = 0; i < btotal; ++i)
        bcomp[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)] =
            boundary_pos[static_cast<std::size_t>(i)][c];
    }
    // all boundary derivative arrays, hoisted out of the node loop
    auto sz = [](int c, int a) { return static_cast<std::size_t>(c * 3 + a); };
    std::vector<std::vector<double>> bd1(static_cast<std::size_t>(amb * 3)),
        bdd(static_cast<std::size_t>(amb * 9));
    auto szz = [](int c, int a, int b) { return static_cast<std::size_t>((c * 3 + a) * 3 + b); };
    for (int c = 0; c < amb; ++c) {
      bd1[sz(c, 0)] =
          ref.boundary_d0(comp[static_cast<std::size_t>(c)], bcomp[static_cast<std::size_t>(c)], 1);
      bdd[szz(c, 0, 0)] =
          ref.boundary_d0(comp[static_cast<std::size_t>(c)], bcomp[static_cast<std::size_t>(c)], 2);
      for (int a = 1; a < n; ++a) {
        bd1[sz(c, a)] = ref.boundary_differentiate(bcomp[static_cast<std::size_t>(c)], a, 1);
        bdd[szz(c, a, a)] = ref.boundary_differentiate(bcomp[static_cast<std::size_t>(c)], a, 2);
        bdd[szz(c, 0, a)] = ref.boundary_differentiate(bd1[sz(c, 0)], a, 1);
        bdd[szz(c, a, 0)] = bdd[szz(c, 0, a)];
      }
      if (n == 3) {
        bdd[szz(c, 1, 2)] = ref.boundary_differentiate(bd1[sz(c, 1)], 2, 1);
        bdd[szz(c, 2, 1)] = bdd[szz(c, 1, 2)];
      }
    }
    for (int i = 0; i < btotal; ++i) {
      PatchJet jet;
      jet.x = boundary_pos[static_cast<std::size_t>(i)];
      for (int a = 0; a < n; ++a) {
        jet.d1[a] = Vec(amb);
        for (int b = 0; b < n; ++b) jet.d2[a][b] = Vec(amb);
      }
      for (int c = 0; c < amb; ++c)
        for (int a = 0; a < n; ++a) {
          jet.d1[a][c] = bd1[sz(c, a)][static_cast<std::size_t>(i)];
          for (int b = 0; b < n; ++b)
            jet.d2[a][b][c] = bdd[szz(c, a, b)][static_cast<std::size_t>(i)];
        }
      const double weight = ref.boundary[static_cast<std::size_t>(i)].w /
                            std::sqrt(det_small(ref.boundary[static_cast<std::size_t>(i)].ghat, n - 1));
      out.boundary[static_cast<std::size_t>(i)] =
          build_boundary_node(ref.space, jet, n, weight,
                              ref.boundary[static_cast<std::size_t>(i)].nu, "rebuilt boundary node");
    }
  }
  return out;
}

}  // namespace immersion
}  // namespace capverify
