#include "capverify/operators.hpp"

#include <cmath>
#include <limits>

namespace capverify {
namespace operators {

using immersion::BoundaryNode;
using immersion::inner_E_nu;
using immersion::inner_E_nu_b;
using immersion::inner_x_mu_b;
using immersion::inner_x_nu;
using immersion::inner_x_nu_b;
using immersion::inner_x_nubar_b;
using immersion::inner_X_nu;
using immersion::inner_X_nu_b;
using immersion::make_field;
using immersion::newton_mu_mu;
using immersion::potential;
using immersion::potential_b;
using immersion::SpaceForm;

namespace {

double sigma_at(const Node& node, int n, int k) {
  return (k <= n) ? node.sigma[k] : 0.0;
}

double sup_abs(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

IdentityResidual make_residual(const std::string& id, const std::vector<double>& lhs,
                               const std::vector<double>& rhs,
                               const std::vector<double>* noise_floor = nullptr) {
  double worst = 0.0;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    double v = std::abs(lhs[i] - rhs[i]);
    if (noise_floor != nullptr) v = std::max(0.0, v - (*noise_floor)[i]);
    worst = std::max(worst, v);
  }
  const double ls = sup_abs(lhs), rs = sup_abs(rhs);
  return IdentityResidual{id, worst / (1.0 + std::max(ls, rs)), ls, rs};
}

}  // namespace

// Near coordinate poles the inverse-metric contraction amplifies node-level
// machine noise far above truncation; pointwise residuals below this floor
// carry no information and are deflated by it.
std::vector<double> hessian_noise_floor(const DiscreteImmersion& m, double field_scale, int r) {
  const int n = m.n;
  std::vector<double> out(m.nodes.size());
  int idx[3] = {0, 0, 0};
  for (std::size_t a = 0; a < m.nodes.size(); ++a) {
    int rem = int(a);
    for (int d = n - 1; d >= 0; --d) {
      idx[d] = rem % m.shape.size[d];
      rem /= m.shape.size[d];
    }
    const Node& nd = m.nodes[a];
    double P[9];
    newton_mixed(nd, n, r, P);
    double pmax = 0.0;
    for (int i = 0; i < n; ++i) pmax = std::max(pmax, std::abs(P[i * n + i]));
    double amp = 0.0;
    for (int k = 0; k < n; ++k) {
      const double w2 = m.grids[k].weight_magnitude(idx[k], 2);
      const double w1 = m.grids[k].weight_magnitude(idx[k], 1);
      double gamma_k = 0.0;
      for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
          gamma_k = std::max(gamma_k, std::abs(nd.gamma[(k * n + l) * n + i]));
      amp += std::abs(nd.ginv[k * n + k]) * (w2 + gamma_k * w1);
    }
    out[a] = 64.0 * 2.220446049250313e-16 * field_scale * pmax * amp;
  }
  return out;
}

namespace {

// <A, grad sigma>_g at every node for an ambient field A(node).
std::vector<double> tangential_pairing(const DiscreteImmersion& m,
                                       const std::vector<std::vector<double>>& dsigma,
                                       const std::function<Vec(const Node&)>& ambient_field) {
  const int n = m.n;
  std::vector<double> out(m.nodes.size());
  for (std::size_t a = 0; a < m.nodes.size(); ++a) {
    const Node& node = m.nodes[a];
    const double conf = m.space.conformal_factor(node.x);
    const Vec A = ambient_field(node);
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      double gi = 0.0;
      for (int j = 0; j < n; ++j) gi += node.ginv[i * n + j] * dsigma[static_cast<std::size_t>(j)][a];
      s += gi * conf * dot(A, node.e[i]);
    }
    out[a] = s;
  }
  return out;
}

}  // namespace

std::vector<std::vector<double>> param_gradient(const DiscreteImmersion& m,
                                                const SurfaceField& f) {
  if (!f.d_interior.empty()) return f.d_interior;
  std::vector<std::vector<double>> d(static_cast<std::size_t>(m.n));
  for (int k = 0; k < m.n; ++k) d[static_cast<std::size_t>(k)] = m.differentiate(f.interior, k, 1);
  return d;
}

std::vector<double> hessian_surface(const DiscreteImmersion& m, const SurfaceField& f) {
  const int n = m.n;
  for (int d = 0; d < n; ++d)
    if (m.shape.size[d] < 4)
      throw DiscretizationError("hessian_surface: grid too coarse for the stencil");
  if (f.interior.size() != m.nodes.size())
    throw ArgumentError("hessian_surface: field does not match the node set");

  const std::vector<std::vector<double>> d1 = param_gradient(m, f);
  std::vector<std::vector<double>> d2(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i) {
    d2[static_cast<std::size_t>(i * n + i)] = m.differentiate(f.interior, i, 2);
    for (int j = i + 1; j < n; ++j) {
      d2[static_cast<std::size_t>(i * n + j)] =
          m.differentiate(d1[static_cast<std::size_t>(i)], j, 1);
      d2[static_cast<std::size_t>(j * n + i)] = d2[static_cast<std::size_t>(i * n + j)];
    }
  }

  std::vector<double> out(m.nodes.size() * static_cast<std::size_t>(n * n));
  for (std::size_t a = 0; a < m.nodes.size(); ++a) {
    const Node& node = m.nodes[a];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = d2[static_cast<std::size_t>(i * n + j)][a];
        for (int k = 0; k < n; ++k)
          v -= node.gamma[(k * n + i) * n + j] * d1[static_cast<std::size_t>(k)][a];
        out[a * static_cast<std::size_t>(n * n) + static_cast<std::size_t>(i * n + j)] = v;
      }
  }
  return out;
}

void newton_mixed(const Node& node, int n, int r, double* out) {
  // S = ginv h, then P_r by the recursion with the nodal sigma values.
  double S[9];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += node.ginv[i * n + k] * node.h[k * n + j];
      S[i * n + j] = s;
    }
  double P[9] = {0};
  for (int i = 0; i < n; ++i) P[i * n + i] = 1.0;
  for (int k = 1; k <= r; ++k) {
    double PS[9];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += P[i * n + l] * S[l * n + j];
        PS[i * n + j] = s;
      }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) P[i * n + j] = (i == j ? node.sigma[k] : 0.0) - PS[i * n + j];
  }
  for (int i = 0; i < n * n; ++i) out[i] = P[i];
}

double trace_newton(const Node& node, int n, int r) { return (n - r) * sigma_at(node, n, r); }

double trace_newton_h2(const Node& node, int n, int r) {
  return sigma_at(node, n, 1) * sigma_at(node, n, r + 1) -
         (r + 2) * sigma_at(node, n, r + 2);
}

SurfaceField L_r(const DiscreteImmersion& m, const SurfaceField& f, int r) {
  const int n = m.n;
  if (r < 0 || r > n - 1) throw ArgumentError("L_r: need 0 <= r <= n-1");
  const std::vector<double> hess = hessian_surface(m, f);
  SurfaceField out;
  out.interior.resize(m.nodes.size());
  for (std::size_t a = 0; a < m.nodes.size(); ++a) {
    const Node& node = m.nodes[a];
    double P[9];
    newton_mixed(node, n, r, P);
    // trace(P * ginv * hess)
    double v = 0.0;
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        double gh = 0.0;
        for (int j = 0; j < n; ++j)
          gh += node.ginv[k * n + j] *
                hess[a * static_cast<std::size_t>(n * n) + static_cast<std::size_t>(j * n + i)];
        v += P[i * n + k] * gh;
      }
    out.interior[a] = v;
  }
  return out;
}

SurfaceField jacobi_J_r(const DiscreteImmersion& m, const SurfaceField& f, int r) {
  SurfaceField out = L_r(m, f, r);
  const double K = m.space.curvature;
  for (std::size_t a = 0; a < m.nodes.size(); ++a) {
    const Node& node = m.nodes[a];
    out.interior[a] += (trace_newton_h2(node, m.n, r) + K * trace_newton(node, m.n, r)) *
                       f.interior[a];
  }
  return out;
}

RobinData robin_q(const DiscreteImmersion& m) {
  if (!m.has_boundary()) throw ArgumentError("robin_q: immersion has no boundary");
  RobinData out;
  out.q.resize(m.boundary.size());
  for (std::size_t i = 0; i < m.boundary.size(); ++i) {
    const BoundaryNode& b = m.boundary[i];
    const double st = std::sin(b.theta);
    if (std::abs(st) < 1e-8)
      throw PreconditionError("robin_q: degenerate contact angle");
    out.q[i] = m.space.support_curvature / st + (std::cos(b.theta) / st) * b.h_mumu;
  }
  return out;
}

std::vector<double> normal_derivative(const DiscreteImmersion& m, const SurfaceField& f) {
  if (!m.has_boundary()) throw ArgumentError("normal_derivative: immersion has no boundary");
  if (!f.dmu_boundary.empty()) return f.dmu_boundary;
  if (f.boundary.size() != m.boundary.size())
    throw ArgumentError("normal_derivative: field has no boundary samples");
  std::vector<std::vector<double>> d(static_cast<std::size_t>(m.n));
  d[0] = m.boundary_d0(f.interior, f.boundary, 1);
  for (int k = 1; k < m.n; ++k) d[static_cast<std::size_t>(k)] = m.boundary_differentiate(f.boundary, k, 1);
  std::vector<double> out(m.boundary.size());
  for (std::size_t i = 0; i < m.boundary.size(); ++i) {
    double v = 0.0;
    for (int k = 0; k < m.n; ++k) v += m.boundary[i].mu_comp[k] * d[static_cast<std::size_t>(k)][i];
    out[i] = v;
  }
  return out;
}

std::vector<double> newton_gradient_form(const DiscreteImmersion& m, int r,
                                         const std::vector<std::vector<double>>& df,
                                         const std::vector<std::vector<double>>& dg) {
  const int n = m.n;
  std::vector<double> out(m.nodes.size());
  for (std::size_t a = 0; a < m.nodes.size(); ++a) {
    const Node& node = m.nodes[a];
    double P[9];
    newton_mixed(node, n, r, P);
    // df^T (P ginv) dg
    double v = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double pg = 0.0;
        for (int k = 0; k < n; ++k) pg += P[i * n + k] * node.ginv[k * n + j];
        v += df[static_cast<std::size_t>(i)][a] * pg * dg[static_cast<std::size_t>(j)][a];
      }
    out[a] = v;
  }
  return out;
}

std::vector<IdentityResidual> jacobi_identity_residuals(const DiscreteImmersion& m, int r) {
  const int n = m.n;
  if (r < 0 || r > n - 1) throw ArgumentError("jacobi_identity_residuals: need 0 <= r <= n-1");
  const SpaceForm& sp = m.space;

  std::vector<double> sig_r1(m.nodes.size());
  for (std::size_t a = 0; a < m.nodes.size(); ++a) sig_r1[a] = sigma_at(m.nodes[a], n, r + 1);
  std::vector<std::vector<double>> dsig(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) dsig[static_cast<std::size_t>(k)] = m.differentiate(sig_r1, k, 1);

  std::vector<IdentityResidual> out;
  const int last = sp.ambient_dim - 1;

  if (!sp.hyperbolic()) {
    SurfaceField f_e = make_field(m, [&](const Node& nd) { return inner_E_nu(sp, nd); }, nullptr);
    SurfaceField f_x = make_field(m, [&](const Node& nd) { return inner_x_nu(sp, nd); }, nullptr);
    const std::vector<double> j_e = jacobi_J_r(m, f_e, r).interior;
    const std::vector<double> j_x = jacobi_J_r(m, f_x, r).interior;
    std::vector<double> rhs_e = tangential_pairing(m, dsig, [&](const Node&) { return basis_vec(sp.ambient_dim, last); });
    std::vector<double> rhs_x = tangential_pairing(m, dsig, [&](const Node& nd) { return nd.x; });
    for (std::size_t a = 0; a < rhs_x.size(); ++a) rhs_x[a] += (r + 1) * sig_r1[a];
    const std::vector<double> floor_e = hessian_noise_floor(m, sup_abs(f_e.interior), r);
    const std::vector<double> floor_x = hessian_noise_floor(m, sup_abs(f_x.interior), r);
    out.push_back(make_residual("jacobi-vertical", j_e, rhs_e, &floor_e));
    out.push_back(make_residual("jacobi-position", j_x, rhs_x, &floor_x));
    return out;
  }

  SurfaceField f_x = make_field(m, [&](const Node& nd) { return inner_x_nu(sp, nd); }, nullptr);
  SurfaceField f_e = make_field(m, [&](const Node& nd) { return inner_E_nu(sp, nd); }, nullptr);
  SurfaceField f_X = make_field(m, [&](const Node& nd) { return inner_X_nu(sp, nd); }, nullptr);
  SurfaceField f_v = make_field(m, [&](const Node& nd) { return potential(sp, nd); }, nullptr);
  const std::vector<double> j_x = jacobi_J_r(m, f_x, r).interior;
  const std::vector<double> j_e = jacobi_J_r(m, f_e, r).interior;
  const std::vector<double> j_X = jacobi_J_r(m, f_X, r).interior;
  const std::vector<double> j_v = jacobi_J_r(m, f_v, r).interior;

  std::vector<double> rhs_x = tangential_pairing(m, dsig, [&](const Node& nd) { return nd.x; });
  std::vector<double> rhs_e = tangential_pairing(m, dsig, [&](const Node&) { return basis_vec(sp.ambient_dim, last); });
  std::vector<double> rhs_X = rhs_x, rhs_v(m.nodes.size());
  for (std::size_t a = 0; a < m.nodes.size(); ++a) {
    const Node& nd = m.nodes[a];
    const double v = potential(sp, nd);
    const double env = inner_E_nu(sp, nd);
    const double sr = sigma_at(nd, n, r);
    rhs_e[a] += -(r + 1) * sig_r1[a] * v - (n - r) * sr * env;
    rhs_X[a] = rhs_x[a] - rhs_e[a];
    rhs_v[a] = (r + 1) * sig_r1[a] * env + trace_newton_h2(nd, n, r) * v;
  }
  const std::vector<double> floor_x = hessian_noise_floor(m, sup_abs(f_x.interior), r);
  const std::vector<double> floor_e = hessian_noise_floor(m, sup_abs(f_e.interior), r);
  const std::vector<double> floor_X = hessian_noise_floor(m, sup_abs(f_X.interior), r);
  const std::vector<double> floor_v = hessian_noise_floor(m, sup_abs(f_v.interior), r);
  out.push_back(make_residual("jacobi-position", j_x, rhs_x, &floor_x));
  out.push_back(make_residual("jacobi-vertical", j_e, rhs_e, &floor_e));
  out.push_back(make_residual("jacobi-shifted", j_X, rhs_X, &floor_X));
  out.push_back(make_residual("jacobi-potential", j_v, rhs_v, &floor_v));
  return out;
}

std::vector<IdentityResidual> robin_residuals(const DiscreteImmersion& m, int /*r*/) {
  if (!m.has_boundary()) throw ArgumentError("robin_residuals: immersion has no boundary");
  const SpaceForm& sp = m.space;
  const double theta = m.theta();
  const double ct = std::cos(theta);
  const RobinData q = robin_q(m);

  auto boundary_residual =
      [&](const std::string& id, const SurfaceField& f,
          const std::function<double(std::size_t, const BoundaryNode&, double)>& rhs_fn) {
        const std::vector<double> dmu = normal_derivative(m, f);
        std::vector<double> lhs(m.boundary.size()), rhs(m.boundary.size());
        for (std::size_t i = 0; i < m.boundary.size(); ++i) {
          lhs[i] = dmu[i];
          rhs[i] = rhs_fn(i, m.boundary[i], f.boundary[i]);
        }
        return make_residual(id, lhs, rhs);
      };

  std::vector<IdentityResidual> out;
  if (!sp.hyperbolic()) {
    SurfaceField f_x = make_field(m, [&](const Node& nd) { return inner_x_nu(sp, nd); },
                                  [&](const BoundaryNode& b) { return inner_x_nu_b(sp, b); });
    SurfaceField f_w = make_field(
        m, [&](const Node& nd) { return 1.0 - ct * inner_E_nu(sp, nd); },
        [&](const BoundaryNode& b) { return 1.0 - ct * inner_E_nu_b(sp, b); });
    out.push_back(boundary_residual(
        "robin-position", f_x,
        [&](std::size_t i, const BoundaryNode&, double fv) { return q.q[i] * fv; }));
    out.push_back(boundary_residual(
        "robin-wetting", f_w,
        [&](std::size_t i, const BoundaryNode&, double fv) { return q.q[i] * fv; }));
    return out;
  }

  SurfaceField f_w = make_field(
      m, [&](const Node& nd) { return potential(sp, nd) - ct * inner_E_nu(sp, nd); },
      [&](const BoundaryNode& b) { return potential_b(sp, b) - ct * inner_E_nu_b(sp, b); });
  SurfaceField f_X = make_field(m, [&](const Node& nd) { return inner_X_nu(sp, nd); },
                                [&](const BoundaryNode& b) { return inner_X_nu_b(sp, b); });
  SurfaceField f_x = make_field(m, [&](const Node& nd) { return inner_x_nu(sp, nd); },
                                [&](const BoundaryNode& b) { return inner_x_nu_b(sp, b); });
  SurfaceField f_u = make_field(
      m, [&](const Node& nd) { return potential(sp, nd) - ct * inner_x_nu(sp, nd); },
      [&](const BoundaryNode& b) { return potential_b(sp, b) - ct * inner_x_nu_b(sp, b); });

  out.push_back(boundary_residual(
      "robin-vertical", f_w,
      [&](std::size_t i, const BoundaryNode&, double fv) { return q.q[i] * fv; }));
  out.push_back(boundary_residual(
      "robin-shifted", f_X,
      [&](std::size_t i, const BoundaryNode&, double fv) { return q.q[i] * fv; }));
  out.push_back(boundary_residual(
      "robin-position", f_x, [&](std::size_t, const BoundaryNode& b, double) {
        return inner_x_nubar_b(sp, b) + b.h_mumu * inner_x_mu_b(sp, b);
      }));
  out.push_back(boundary_residual(
      "robin-u", f_u,
      [&](std::size_t i, const BoundaryNode&, double fv) { return q.q[i] * fv; }));
  return out;
}

EllipticityReport ellipticity_report(const DiscreteImmersion& m, int r) {
  const int n = m.n;
  if (r < 0 || r > n - 1) throw ArgumentError("ellipticity_report: need 0 <= r <= n-1");
  EllipticityReport rep;
  rep.h_r1_positive = true;
  rep.min_newton_eigen = std::numeric_limits<double>::infinity();
  rep.min_h_j = std::numeric_limits<double>::infinity();
  for (const Node& node : m.nodes) {
    if (sigma_at(node, n, r + 1) <= 0.0) rep.h_r1_positive = false;
    bool all_pos = true;
    for (int i = 0; i < n; ++i) all_pos = all_pos && node.kappa[i] > 0.0;
    if (all_pos) rep.elliptic_point = true;
    std::vector<double> kap(node.kappa, node.kappa + n);
    for (int j = 0; j <= r; ++j) {
      const std::vector<double> eig = symfun::newton_eigenvalues(kap, j);
      for (double e : eig) rep.min_newton_eigen = std::min(rep.min_newton_eigen, e);
    }
    for (int j = 0; j <= r + 1; ++j)
      rep.min_h_j = std::min(rep.min_h_j, sigma_at(node, n, j) / binomial(n, j));
  }
  return rep;
}

}  // namespace operators
}  // namespace capverify
