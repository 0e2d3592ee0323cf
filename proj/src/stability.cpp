#include "capverify/stability.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace capverify {
namespace stability {

using immersion::BoundaryNode;
using immersion::inner_E_nu;
using immersion::inner_E_nu_b;
using immersion::inner_x_nu;
using immersion::inner_x_nu_b;
using immersion::inner_X_nu;
using immersion::inner_X_nu_b;
using immersion::integrate;
using immersion::integrate_boundary;
using immersion::make_field;
using immersion::newton_mu_mu;
using immersion::Node;
using immersion::potential;
using immersion::potential_b;
using operators::newton_gradient_form;
using operators::normal_derivative;
using operators::param_gradient;
using operators::robin_q;
using operators::trace_newton;
using operators::trace_newton_h2;

namespace {

double sigma_at(const Node& node, int n, int k) { return (k <= n) ? node.sigma[k] : 0.0; }

double sup_abs(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

// Mean curvature H_j, requiring it to be constant over the nodes.
double constant_h(const DiscreteImmersion& m, int j, double spread_tol, const char* who) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const Node& node : m.nodes) {
    const double v = sigma_at(node, m.n, j) / binomial(m.n, j);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if ((hi - lo) / (1.0 + std::max(std::abs(lo), std::abs(hi))) > spread_tol) {
    std::ostringstream os;
    os << who << ": H_" << j << " is not constant (spread " << (hi - lo) << ")";
    throw PreconditionError(os.str());
  }
  return 0.5 * (lo + hi);
}

// Angular factors for the cap parametrizations, with first derivatives in
// the angular parameters. Degree controls the radial sin-power needed for
// smoothness through the pole.
struct AngularFn {
  int degree;
  std::function<double(const double*)> value;
  std::function<double(const double*, int)> deriv;  // d/d u_dim, dim in {1,2}
};

std::vector<AngularFn> angular_table(int n) {
  std::vector<AngularFn> out;
  if (n == 2) {
    for (int mode = 0; mode <= 4; ++mode) {
      out.push_back({mode, [mode](const double* u) { return std::cos(mode * u[1]); },
                     [mode](const double* u, int) { return -mode * std::sin(mode * u[1]); }});
      if (mode > 0)
        out.push_back({mode, [mode](const double* u) { return std::sin(mode * u[1]); },
                       [mode](const double* u, int) { return mode * std::cos(mode * u[1]); }});
    }
    return out;
  }
  // n == 3: real spherical harmonics on the transverse sphere up to degree 2
  out.push_back({0, [](const double*) { return 1.0; }, [](const double*, int) { return 0.0; }});
  out.push_back({1, [](const double* u) { return std::cos(u[1]); },
                 [](const double* u, int d) { return d == 1 ? -std::sin(u[1]) : 0.0; }});
  out.push_back({1, [](const double* u) { return std::sin(u[1]) * std::cos(u[2]); },
                 [](const double* u, int d) {
                   return d == 1 ? std::cos(u[1]) * std::cos(u[2])
                                 : -std::sin(u[1]) * std::sin(u[2]);
                 }});
  out.push_back({1, [](const double* u) { return std::sin(u[1]) * std::sin(u[2]); },
                 [](const double* u, int d) {
                   return d == 1 ? std::cos(u[1]) * std::sin(u[2])
                                 : std::sin(u[1]) * std::cos(u[2]);
                 }});
  out.push_back({2,
                 [](const double* u) {
                   const double c = std::cos(u[1]);
                   return 1.5 * c * c - 0.5;
                 },
                 [](const double* u, int d) {
                   return d == 1 ? -3.0 * std::cos(u[1]) * std::sin(u[1]) : 0.0;
                 }});
  out.push_back({2, [](const double* u) { return std::sin(u[1]) * std::cos(u[1]) * std::cos(u[2]); },
                 [](const double* u, int d) {
                   return d == 1 ? std::cos(2.0 * u[1]) * std::cos(u[2])
                                 : -std::sin(u[1]) * std::cos(u[1]) * std::sin(u[2]);
                 }});
  out.push_back({2,
                 [](const double* u) {
                   const double s = std::sin(u[1]);
                   return s * s * std::cos(2.0 * u[2]);
                 },
                 [](const double* u, int d) {
                   const double s = std::sin(u[1]);
                   return d == 1 ? 2.0 * s * std::cos(u[1]) * std::cos(2.0 * u[2])
                                 : -2.0 * s * s * std::sin(2.0 * u[2]);
                 }});
  return out;
}

double radial(int ell, int k, double s) {
  return std::pow(std::sin(s), ell) * std::pow(std::cos(s), k);
}

double radial_d(int ell, int k, double s) {
  const double sn = std::sin(s), cs = std::cos(s);
  double v = 0.0;
  if (ell > 0) v += ell * std::pow(sn, ell - 1) * std::pow(cs, k + 1);
  if (k > 0) v -= k * std::pow(sn, ell + 1) * std::pow(cs, k - 1);
  return v;
}

struct CapBasisContext {
  double q = 0.0;       // Robin coefficient (constant on caps)
  double qhat = 0.0;    // q scaled by sqrt(g_ss) at the boundary
  double smax = 0.0;    // boundary polar angle
};

CapBasisContext cap_context(const DiscreteImmersion& m) {
  if (!m.cap || !m.has_boundary())
    throw ArgumentError("admissible_basis: built-in cap families only");
  CapBasisContext ctx;
  const std::vector<double> q = robin_q(m).q;
  double qs = 0.0;
  for (double v : q) qs += v;
  ctx.q = qs / double(q.size());
  ctx.smax = m.grids[0].b();
  ctx.qhat = ctx.q * std::sqrt(m.boundary.front().g[0]);
  return ctx;
}

// Robin-pinned radial profiles for one angular degree: generators
// rho_j = sin^l s cos^j s, each corrected by the generator with the largest
// boundary-constraint coefficient so that p'(smax) = qhat p(smax) holds in
// closed form. Triangular in j, hence linearly independent.
struct RadialFamily {
  int ell = 0;
  int ref = -1;        // reference generator index, -1 when all admissible
  double wref = 0.0;   // its constraint coefficient
  std::vector<double> w;

  RadialFamily(int degree, int count, double smax, double qhat) : ell(degree) {
    w.resize(static_cast<std::size_t>(count + 1));
    double best = 0.0;
    for (int j = 0; j <= count; ++j) {
      w[static_cast<std::size_t>(j)] =
          radial_d(degree, j, smax) - qhat * radial(degree, j, smax);
      if (std::abs(w[static_cast<std::size_t>(j)]) > best) {
        best = std::abs(w[static_cast<std::size_t>(j)]);
        ref = j;
        wref = w[static_cast<std::size_t>(j)];
      }
    }
    if (best < 1e-12) ref = -1;
  }

  // k-th member of the family (k skips the reference generator)
  int generator(int k) const {
    if (ref < 0) return k;
    return (k < ref) ? k : k + 1;
  }
  double coeff(int j) const {  // coefficient of rho_ref in member built on rho_j
    if (ref < 0) return 0.0;
    return -w[static_cast<std::size_t>(j)] / wref;
  }

  double value(int k, double s) const {
    const int j = generator(k);
    double v = radial(ell, j, s);
    if (ref >= 0) v += coeff(j) * radial(ell, ref, s);
    return v;
  }
  double deriv(int k, double s) const {
    const int j = generator(k);
    double v = radial_d(ell, j, s);
    if (ref >= 0) v += coeff(j) * radial_d(ell, ref, s);
    return v;
  }
};

SurfaceField pinned_element(const DiscreteImmersion& m, const CapBasisContext& ctx,
                            const AngularFn& ang, int k) {
  const RadialFamily fam(ang.degree, 16, ctx.smax, ctx.qhat);
  auto p = [&](double s) { return fam.value(k, s); };
  auto dp = [&](double s) { return fam.deriv(k, s); };

  SurfaceField f;
  f.analytic = true;
  const int total = m.shape.total();
  f.interior.resize(static_cast<std::size_t>(total));
  f.d_interior.assign(static_cast<std::size_t>(m.n), std::vector<double>(static_cast<std::size_t>(total)));
  double u[3] = {0, 0, 0};
  double sup = 0.0;
  for (int i = 0; i < total; ++i) {
    m.node_params(i, u);
    const double a = ang.value(u);
    f.interior[static_cast<std::size_t>(i)] = p(u[0]) * a;
    f.d_interior[0][static_cast<std::size_t>(i)] = dp(u[0]) * a;
    for (int d = 1; d < m.n; ++d)
      f.d_interior[static_cast<std::size_t>(d)][static_cast<std::size_t>(i)] =
          p(u[0]) * ang.deriv(u, d);
    sup = std::max(sup, std::abs(f.interior[static_cast<std::size_t>(i)]));
  }
  const int btotal = m.boundary_shape.total();
  f.boundary.resize(static_cast<std::size_t>(btotal));
  f.dmu_boundary.resize(static_cast<std::size_t>(btotal));
  for (int i = 0; i < btotal; ++i) {
    m.boundary_params(i, u);
    const double a = ang.value(u);
    f.boundary[static_cast<std::size_t>(i)] = p(ctx.smax) * a;
    // mu is the unit radial direction at the boundary of a cap
    f.dmu_boundary[static_cast<std::size_t>(i)] =
        dp(ctx.smax) * a / std::sqrt(m.boundary[static_cast<std::size_t>(i)].g[0]);
    sup = std::max(sup, std::abs(f.boundary[static_cast<std::size_t>(i)]));
  }
  if (sup > 0.0) {
    const double inv = 1.0 / sup;
    for (double& v : f.interior) v *= inv;
    for (double& v : f.boundary) v *= inv;
    for (double& v : f.dmu_boundary) v *= inv;
    for (auto& dv : f.d_interior)
      for (double& v : dv) v *= inv;
  }
  return f;
}

double quadratic_value(const DiscreteImmersion& m, const SurfaceField& a, const SurfaceField& b,
                       int r, const std::vector<double>& qvals) {
  const int n = m.n;
  const double pref = double(n - r) / binomial(n, r + 1);
  const std::vector<double> grad_term =
      newton_gradient_form(m, r, param_gradient(m, a), param_gradient(m, b));
  std::vector<double> mass(m.nodes.size());
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    const Node& nd = m.nodes[i];
    mass[i] = (trace_newton_h2(nd, n, r) + m.space.curvature * trace_newton(nd, n, r)) *
              a.interior[i] * b.interior[i];
  }
  double boundary_term = 0.0;
  if (m.has_boundary()) {
    std::vector<double> bt(m.boundary.size());
    for (std::size_t i = 0; i < m.boundary.size(); ++i)
      bt[i] = qvals[i] * newton_mu_mu(m.boundary[i], n, r) * a.boundary[i] * b.boundary[i];
    boundary_term = integrate_boundary(m, bt);
  }
  return pref * (integrate(m, grad_term) - boundary_term - integrate(m, mass));
}

}  // namespace

AdmissibleField admit(const DiscreteImmersion& m, SurfaceField phi) {
  AdmissibleField out;
  out.scale = std::max(sup_abs(phi.interior), sup_abs(phi.boundary));
  out.mean_residual = std::abs(integrate(m, phi.interior));
  if (m.has_boundary()) {
    const std::vector<double> q = robin_q(m).q;
    const std::vector<double> dmu = normal_derivative(m, phi);
    double worst = 0.0;
    for (std::size_t i = 0; i < m.boundary.size(); ++i)
      worst = std::max(worst, std::abs(dmu[i] - q[i] * phi.boundary[i]));
    out.robin_residual = worst;
  }
  out.phi = std::move(phi);
  return out;
}

QuadraticFormReport quadratic_form(const DiscreteImmersion& m, const AdmissibleField& phi,
                                   int r, double tol) {
  if (r < 0 || r > m.n - 1) throw ArgumentError("quadratic_form: need 0 <= r <= n-1");
  std::vector<double> qvals;
  double qsup = 0.0;
  if (m.has_boundary()) {
    qvals = robin_q(m).q;
    qsup = sup_abs(qvals);
  }
  const double mean_gate = tol * m.area() * phi.scale;
  const double robin_gate = tol * (1.0 + qsup) * phi.scale;
  if (phi.mean_residual > mean_gate || phi.robin_residual > robin_gate) {
    std::ostringstream os;
    os << "quadratic_form: field not admissible (mean residual " << phi.mean_residual
       << ", Robin residual " << phi.robin_residual << ")";
    throw PreconditionError(os.str());
  }
  QuadraticFormReport rep;
  rep.mean_residual = phi.mean_residual;
  rep.robin_residual = phi.robin_residual;
  rep.value = quadratic_value(m, phi.phi, phi.phi, r, qvals);
  return rep;
}

AdmissibleField test_function_euclidean(const DiscreteImmersion& m, int r) {
  if (m.space.hyperbolic())
    throw ArgumentError("test_function_euclidean: Euclidean model required");
  if (r < 0 || r > m.n - 1) throw ArgumentError("test_function_euclidean: need 0 <= r <= n-1");
  const double h_r1 = constant_h(m, r + 1, 1e-8, "test_function_euclidean");
  const double ct = std::cos(m.theta());
  const int n = m.n;
  SurfaceField omega = make_field(
      m, [&](const Node& nd) { return 1.0 - ct * inner_E_nu(m.space, nd); },
      [&](const BoundaryNode& b) { return 1.0 - ct * inner_E_nu_b(m.space, b); });
  std::vector<double> omega_hr(m.nodes.size());
  for (std::size_t i = 0; i < m.nodes.size(); ++i)
    omega_hr[i] = omega.interior[i] * sigma_at(m.nodes[i], n, r) / binomial(n, r);
  const double alpha = integrate(m, omega_hr) / integrate(m, omega.interior);

  SurfaceField phi = make_field(
      m,
      [&](const Node& nd) {
        return alpha * (1.0 - ct * inner_E_nu(m.space, nd)) - h_r1 * inner_x_nu(m.space, nd);
      },
      [&](const BoundaryNode& b) {
        return alpha * (1.0 - ct * inner_E_nu_b(m.space, b)) - h_r1 * inner_x_nu_b(m.space, b);
      });
  return admit(m, std::move(phi));
}

AdmissibleField test_function_horoball(const DiscreteImmersion& m, int r) {
  if (!m.space.hyperbolic())
    throw ArgumentError("test_function_horoball: hyperbolic model required");
  if (r < 0 || r > m.n - 1) throw ArgumentError("test_function_horoball: need 0 <= r <= n-1");
  const double h_r1 = constant_h(m, r + 1, 1e-8, "test_function_horoball");
  const double ct = std::cos(m.theta());
  const int n = m.n;
  SurfaceField u = make_field(
      m, [&](const Node& nd) { return potential(m.space, nd) - ct * inner_x_nu(m.space, nd); },
      [&](const BoundaryNode& b) {
        return potential_b(m.space, b) - ct * inner_x_nu_b(m.space, b);
      });
  const double u_int = integrate(m, u.interior);
  if (std::abs(u_int) < 1e-6 * m.area())
    throw PreconditionError("test_function_horoball: normalizer integral of u is degenerate");
  std::vector<double> u_hr(m.nodes.size());
  for (std::size_t i = 0; i < m.nodes.size(); ++i)
    u_hr[i] = u.interior[i] * sigma_at(m.nodes[i], n, r) / binomial(n, r);
  const double lambda = integrate(m, u_hr) / u_int;

  SurfaceField phi = make_field(
      m,
      [&](const Node& nd) {
        return lambda * (potential(m.space, nd) - ct * inner_x_nu(m.space, nd)) -
               h_r1 * inner_X_nu(m.space, nd);
      },
      [&](const BoundaryNode& b) {
        return lambda * (potential_b(m.space, b) - ct * inner_x_nu_b(m.space, b)) -
               h_r1 * inner_X_nu_b(m.space, b);
      });
  return admit(m, std::move(phi));
}

std::vector<SurfaceField> admissible_basis(const DiscreteImmersion& m, int count) {
  const CapBasisContext ctx = cap_context(m);
  const std::vector<AngularFn> table = angular_table(m.n);
  std::vector<SurfaceField> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; int(out.size()) < count; ++k) {
    if (k > 32) throw ArgumentError("admissible_basis: basis request too large");
    for (const AngularFn& ang : table) {
      if (int(out.size()) >= count) break;
      out.push_back(pinned_element(m, ctx, ang, k));
    }
  }
  return out;
}

AdmissibleField random_admissible_field(const DiscreteImmersion& m, Rng& rng, int pool) {
  const std::vector<SurfaceField> basis = admissible_basis(m, pool);
  std::vector<double> coef(basis.size());
  for (double& c : coef) c = rng.uniform(-1.0, 1.0);
  // exact mean-zero projection against the quadrature functional
  std::vector<double> means(basis.size());
  double mm = 0.0;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    means[k] = integrate(m, basis[k].interior);
    mm += means[k] * means[k];
  }
  double cm = 0.0;
  for (std::size_t k = 0; k < basis.size(); ++k) cm += coef[k] * means[k];
  for (std::size_t k = 0; k < basis.size(); ++k) coef[k] -= cm * means[k] / mm;

  SurfaceField phi;
  phi.analytic = true;
  phi.interior.assign(m.nodes.size(), 0.0);
  phi.boundary.assign(m.boundary.size(), 0.0);
  phi.dmu_boundary.assign(m.boundary.size(), 0.0);
  phi.d_interior.assign(static_cast<std::size_t>(m.n),
                        std::vector<double>(m.nodes.size(), 0.0));
  for (std::size_t k = 0; k < basis.size(); ++k) {
    for (std::size_t i = 0; i < m.nodes.size(); ++i)
      phi.interior[i] += coef[k] * basis[k].interior[i];
    for (std::size_t i = 0; i < m.boundary.size(); ++i) {
      phi.boundary[i] += coef[k] * basis[k].boundary[i];
      phi.dmu_boundary[i] += coef[k] * basis[k].dmu_boundary[i];
    }
    for (int d = 0; d < m.n; ++d)
      for (std::size_t i = 0; i < m.nodes.size(); ++i)
        phi.d_interior[static_cast<std::size_t>(d)][i] +=
            coef[k] * basis[k].d_interior[static_cast<std::size_t>(d)][i];
  }
  return admit(m, std::move(phi));
}

double lowest_eigenvalue(const DiscreteImmersion& m, int r, int basis_size) {
  if (basis_size < 3) throw ArgumentError("lowest_eigenvalue: basis too small");
  const operators::EllipticityReport gate = operators::ellipticity_report(m, r);
  if (!(gate.min_newton_eigen > 0.0))
    throw PreconditionError("lowest_eigenvalue: Newton tensor not positive definite");
  const std::vector<SurfaceField> basis = admissible_basis(m, basis_size);
  const std::vector<double> qvals = robin_q(m).q;
  const int nb = int(basis.size());

  Mat a(nb, nb), b(nb, nb);
  std::vector<double> means(static_cast<std::size_t>(nb));
  for (int i = 0; i < nb; ++i) {
    means[static_cast<std::size_t>(i)] = integrate(m, basis[static_cast<std::size_t>(i)].interior);
    for (int j = i; j < nb; ++j) {
      a(i, j) = a(j, i) = quadratic_value(m, basis[static_cast<std::size_t>(i)],
                                          basis[static_cast<std::size_t>(j)], r, qvals);
      std::vector<double> prod(m.nodes.size());
      for (std::size_t k = 0; k < m.nodes.size(); ++k)
        prod[k] = basis[static_cast<std::size_t>(i)].interior[k] *
                  basis[static_cast<std::size_t>(j)].interior[k];
      b(i, j) = b(j, i) = integrate(m, prod);
    }
  }

  // Householder basis of the mean-zero subspace.
  double mn = 0.0;
  for (double v : means) mn += v * v;
  mn = std::sqrt(mn);
  if (mn < 1e-14) {
    // every basis element is already mean-zero
    const Eigen eig = gen_sym_eigen(a, b, false);
    return eig.values.front();
  }
  std::vector<double> v(means);
  v[0] += (v[0] >= 0.0 ? mn : -mn);
  double vv = 0.0;
  for (double x : v) vv += x * x;
  Mat nmat(nb, nb - 1);  // columns 1..nb-1 of the Householder reflector
  for (int col = 1; col < nb; ++col)
    for (int row = 0; row < nb; ++row)
      nmat(row, col - 1) = (row == col ? 1.0 : 0.0) -
                           2.0 * v[static_cast<std::size_t>(row)] * v[static_cast<std::size_t>(col)] / vv;

  Mat ar = nmat.transposed() * a * nmat;
  Mat br = nmat.transposed() * b * nmat;
  for (int i = 0; i < nb - 1; ++i)
    for (int j = i + 1; j < nb - 1; ++j) {
      ar(i, j) = ar(j, i) = 0.5 * (ar(i, j) + ar(j, i));
      br(i, j) = br(j, i) = 0.5 * (br(i, j) + br(j, i));
    }
  Mat lower;
  if (!cholesky(br, lower))
    throw NumericalError("lowest_eigenvalue: degenerate basis (mass matrix not positive definite)");
  const Eigen eig = gen_sym_eigen(ar, br, false);
  return eig.values.front();
}

RigidityGaps rigidity_gap_report(const DiscreteImmersion& m, int r) {
  const int n = m.n;
  if (r < 0 || r > n - 1) throw ArgumentError("rigidity_gap_report: need 0 <= r <= n-1");
  // Garding gate at the order the Newton-MacLaurin chain needs.
  const int cone_order = std::min(r + 2, n);
  for (const Node& nd : m.nodes)
    for (int i = 1; i <= cone_order; ++i)
      if (!(sigma_at(nd, n, i) > 0.0))
        throw PreconditionError("rigidity_gap_report: spectrum leaves the Garding cone");

  RigidityGaps out;
  out.newton_maclaurin_vacuous = (r == n - 1);
  if (!out.newton_maclaurin_vacuous) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const Node& nd : m.nodes) {
      const double h1 = sigma_at(nd, n, 1) / binomial(n, 1);
      const double hr1 = sigma_at(nd, n, r + 1) / binomial(n, r + 1);
      const double hr2 = sigma_at(nd, n, r + 2) / binomial(n, r + 2);
      const double gap = h1 * hr1 - hr2;
      lo = std::min(lo, gap);
      hi = std::max(hi, gap);
    }
    out.newton_maclaurin_min = lo;
    out.newton_maclaurin_max = hi;
  }

  // integral and pointwise gaps need constant H_{r+1}
  double h_r1 = 0.0;
  try {
    h_r1 = constant_h(m, r + 1, 1e-8, "rigidity_gap_report");
    out.cmc = true;
  } catch (const PreconditionError&) {
    out.cmc = false;
    return out;
  }

  if (!m.space.hyperbolic()) {
    const double ct = std::cos(m.theta());
    std::vector<double> w(m.nodes.size()), w_ratio(m.nodes.size()), w_h1(m.nodes.size());
    for (std::size_t i = 0; i < m.nodes.size(); ++i) {
      const Node& nd = m.nodes[i];
      w[i] = 1.0 - ct * inner_E_nu(m.space, nd);
      const double hr = sigma_at(nd, n, r) / binomial(n, r);
      w_ratio[i] = w[i] * hr / h_r1;
      w_h1[i] = w[i] * sigma_at(nd, n, 1) / binomial(n, 1);
    }
    const double iw = integrate(m, w);
    out.hoelder_gap = (integrate(m, w_ratio) * integrate(m, w_h1)) / (iw * iw) - 1.0;
  } else {
    const double ct = std::cos(m.theta());
    std::vector<double> u(m.nodes.size()), u_hr(m.nodes.size());
    for (std::size_t i = 0; i < m.nodes.size(); ++i) {
      const Node& nd = m.nodes[i];
      u[i] = potential(m.space, nd) - ct * inner_x_nu(m.space, nd);
      u_hr[i] = u[i] * sigma_at(nd, n, r) / binomial(n, r);
    }
    const double lambda = integrate(m, u_hr) / integrate(m, u);
    out.lambda = lambda;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const Node& nd : m.nodes) {
      const double s1 = sigma_at(nd, n, 1), sr1 = sigma_at(nd, n, r + 1);
      const double phi_c = lambda * (r + 1) * sr1 - (n - r) * sigma_at(nd, n, r) * h_r1;
      const double psi_c = lambda * (s1 * sr1 - (r + 2) * sigma_at(nd, n, r + 2)) -
                           (r + 1) * sr1 * h_r1;
      const double gap = psi_c * lambda - phi_c * h_r1;
      lo = std::min(lo, gap);
      hi = std::max(hi, gap);
    }
    out.pointwise_min = lo;
    out.pointwise_max = hi;
  }
  return out;
}

AuxiliaryResiduals auxiliary_identity_residuals(const DiscreteImmersion& m, int r) {
  if (!m.space.hyperbolic())
    throw ArgumentError("auxiliary_identity_residuals: hyperbolic model required");
  const int n = m.n;
  const double h_r1 = constant_h(m, r + 1, 1e-8, "auxiliary_identity_residuals");
  const double ct = std::cos(m.theta());

  // lambda from the u normalizer
  std::vector<double> u(m.nodes.size()), u_hr(m.nodes.size());
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    const Node& nd = m.nodes[i];
    u[i] = potential(m.space, nd) - ct * inner_x_nu(m.space, nd);
    u_hr[i] = u[i] * sigma_at(nd, n, r) / binomial(n, r);
  }
  const double u_int = integrate(m, u);
  if (std::abs(u_int) < 1e-6 * m.area())
    throw PreconditionError("auxiliary_identity_residuals: degenerate u normalizer");
  const double lambda = integrate(m, u_hr) / u_int;

  SurfaceField big_phi = make_field(
      m, [&](const Node& nd) { return -inner_E_nu(m.space, nd); },
      [&](const BoundaryNode& b) { return -inner_E_nu_b(m.space, b); });
  SurfaceField big_psi = make_field(
      m,
      [&](const Node& nd) {
        return -h_r1 * potential(m.space, nd) - lambda * inner_E_nu(m.space, nd);
      },
      [&](const BoundaryNode& b) {
        return -h_r1 * potential_b(m.space, b) - lambda * inner_E_nu_b(m.space, b);
      });

  AuxiliaryResiduals out;
  {
    const std::vector<double> lp = operators::L_r(m, big_phi, r).interior;
    const std::vector<double> floor =
        operators::hessian_noise_floor(m, sup_abs(big_phi.interior), r);
    std::vector<double> rhs(m.nodes.size());
    for (std::size_t i = 0; i < m.nodes.size(); ++i) {
      const Node& nd = m.nodes[i];
      rhs[i] = potential(m.space, nd) * (r + 1) * sigma_at(nd, n, r + 1) +
               inner_E_nu(m.space, nd) * trace_newton_h2(nd, n, r);
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < m.nodes.size(); ++i)
      worst = std::max(worst, std::max(0.0, std::abs(lp[i] - rhs[i]) - floor[i]));
    out.l_phi = worst / (1.0 + std::max(sup_abs(lp), sup_abs(rhs)));
  }
  {
    const std::vector<double> lp = operators::L_r(m, big_psi, r).interior;
    const std::vector<double> floor =
        operators::hessian_noise_floor(m, sup_abs(big_psi.interior), r);
    std::vector<double> rhs(m.nodes.size());
    for (std::size_t i = 0; i < m.nodes.size(); ++i) {
      const Node& nd = m.nodes[i];
      const double s1 = sigma_at(nd, n, 1), sr1 = sigma_at(nd, n, r + 1);
      const double phi_c = lambda * (r + 1) * sr1 - (n - r) * sigma_at(nd, n, r) * h_r1;
      const double psi_c =
          lambda * (s1 * sr1 - (r + 2) * sigma_at(nd, n, r + 2)) - (r + 1) * sr1 * h_r1;
      rhs[i] = phi_c * potential(m.space, nd) + psi_c * inner_E_nu(m.space, nd);
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < m.nodes.size(); ++i)
      worst = std::max(worst, std::max(0.0, std::abs(lp[i] - rhs[i]) - floor[i]));
    out.l_psi = worst / (1.0 + std::max(sup_abs(lp), sup_abs(rhs)));
  }
  {
    double worst_v = 0.0, worst_d = 0.0, worst_psi = 0.0;
    const std::vector<double> dmu = normal_derivative(m, big_phi);
    for (std::size_t i = 0; i < m.boundary.size(); ++i) {
      const BoundaryNode& b = m.boundary[i];
      worst_v = std::max(worst_v, std::abs(big_phi.boundary[i] + std::cos(b.theta)));
      worst_d = std::max(worst_d, std::abs(dmu[i] - std::sin(b.theta) * b.h_mumu));
      worst_psi = std::max(worst_psi,
                           std::abs(big_psi.boundary[i] + h_r1 + lambda * std::cos(b.theta)));
    }
    out.phi_boundary = worst_v;
    out.phi_derivative = worst_d;
    out.psi_boundary = worst_psi;
  }
  {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : big_psi.interior) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    out.psi_spread = hi - lo;
  }
  return out;
}

}  // namespace stability
}  // namespace capverify
