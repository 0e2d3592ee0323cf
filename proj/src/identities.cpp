#include "capverify/identities.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace capverify {
namespace identities {

using immersion::BoundaryNode;
using immersion::inner_E_nu;
using immersion::inner_x_nu;
using immersion::inner_X_nu;
using immersion::inner_x_nubar_b;
using immersion::integrate;
using immersion::integrate_boundary;
using immersion::newton_mu_mu;
using immersion::Node;
using immersion::potential;

namespace {

double sigma_at(const Node& node, int n, int k) { return (k <= n) ? node.sigma[k] : 0.0; }

std::vector<double> nodal(const DiscreteImmersion& m,
                          const std::function<double(const Node&)>& f) {
  std::vector<double> out(m.nodes.size());
  for (std::size_t i = 0; i < m.nodes.size(); ++i) out[i] = f(m.nodes[i]);
  return out;
}

std::vector<double> boundary_nodal(const DiscreteImmersion& m,
                                   const std::function<double(const BoundaryNode&)>& f) {
  std::vector<double> out(m.boundary.size());
  for (std::size_t i = 0; i < m.boundary.size(); ++i) out[i] = f(m.boundary[i]);
  return out;
}

}  // namespace

double sigma_spread(const DiscreteImmersion& m, int r1) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const Node& node : m.nodes) {
    const double s = sigma_at(node, m.n, r1);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return (hi - lo) / (1.0 + std::max(std::abs(lo), std::abs(hi)));
}

double minkowski_euclidean(const DiscreteImmersion& m, int r) {
  if (m.space.hyperbolic()) throw ArgumentError("minkowski_euclidean: Euclidean model required");
  if (r < 0 || r > m.n - 1) throw ArgumentError("minkowski_euclidean: need 0 <= r <= n-1");
  const double ct = std::cos(m.theta());
  const int n = m.n;
  const double cr = binomial(n, r), cr1 = binomial(n, r + 1);
  const double lead = integrate(m, nodal(m, [&](const Node& nd) {
    return (1.0 - ct * inner_E_nu(m.space, nd)) * sigma_at(nd, n, r) / cr;
  }));
  const double tail = integrate(m, nodal(m, [&](const Node& nd) {
    return inner_x_nu(m.space, nd) * sigma_at(nd, n, r + 1) / cr1;
  }));
  const double denom = std::max({std::abs(lead), std::abs(tail), 1e-300});
  return std::abs(lead - tail) / denom;
}

double minkowski_horoball(const DiscreteImmersion& m, int r) {
  if (!m.space.hyperbolic()) throw ArgumentError("minkowski_horoball: hyperbolic model required");
  if (r < 0 || r > m.n - 1) throw ArgumentError("minkowski_horoball: need 0 <= r <= n-1");
  const double ct = std::cos(m.theta());
  const int n = m.n;
  const double cr = binomial(n, r), cr1 = binomial(n, r + 1);
  const double lead = integrate(m, nodal(m, [&](const Node& nd) {
    return (potential(m.space, nd) - ct * inner_x_nu(m.space, nd)) * sigma_at(nd, n, r) / cr;
  }));
  const double tail = integrate(m, nodal(m, [&](const Node& nd) {
    return inner_X_nu(m.space, nd) * sigma_at(nd, n, r + 1) / cr1;
  }));
  // The identity is degenerate on a totally geodesic disk (both terms
  // vanish); the 1-floor keeps the residual meaningful there.
  const double denom = std::max({std::abs(lead), std::abs(tail), 1.0});
  return std::abs(lead - tail) / denom;
}

double boundary_flux_1(const DiscreteImmersion& m, int r) {
  if (!m.space.hyperbolic()) throw ArgumentError("boundary_flux_1: hyperbolic model required");
  if (r < 0 || r > m.n - 1) throw ArgumentError("boundary_flux_1: need 0 <= r <= n-1");
  const int n = m.n;
  const double lhs = -(r + 1) * integrate(m, nodal(m, [&](const Node& nd) {
    return inner_x_nu(m.space, nd) * sigma_at(nd, n, r + 1);
  }));
  const double rhs = integrate_boundary(m, boundary_nodal(m, [&](const BoundaryNode& b) {
    return newton_mu_mu(b, n, r) *
           (std::cos(b.theta) * inner_x_nubar_b(m.space, b) - std::sin(b.theta));
  }));
  return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1.0});
}

double boundary_flux_2(const DiscreteImmersion& m, int r) {
  if (!m.space.hyperbolic()) throw ArgumentError("boundary_flux_2: hyperbolic model required");
  if (r < 0 || r > m.n - 1)
    throw ArgumentError("boundary_flux_2: need 0 <= r <= n-1 (P_r undefined past n-1)");
  const int n = m.n;
  const double lhs = (n - r) * integrate(m, nodal(m, [&](const Node& nd) {
    return sigma_at(nd, n, r) * inner_x_nu(m.space, nd);
  }));
  const double rhs = integrate_boundary(m, boundary_nodal(m, [&](const BoundaryNode& b) {
    return newton_mu_mu(b, n, r) * inner_x_nubar_b(m.space, b);
  }));
  return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1.0});
}

double cmc_boundary_identity(const DiscreteImmersion& m, int r) {
  if (!m.space.hyperbolic()) throw ArgumentError("cmc_boundary_identity: hyperbolic model required");
  if (r < 0 || r > m.n - 1) throw ArgumentError("cmc_boundary_identity: need 0 <= r <= n-1");
  const double spread = sigma_spread(m, r + 1);
  if (spread > 1e-8) {
    std::ostringstream os;
    os << "cmc_boundary_identity: sigma_" << (r + 1)
       << " is not constant (relative spread " << spread << ")";
    throw PreconditionError(os.str());
  }
  const int n = m.n;
  const double total = integrate_boundary(m, boundary_nodal(m, [&](const BoundaryNode& b) {
    const double xb = inner_x_nubar_b(m.space, b);
    return newton_mu_mu(b, n, r) *
           (-std::sin(b.theta) + std::cos(b.theta) * xb + xb * b.h_mumu);
  }));
  const double scale = integrate_boundary(m, boundary_nodal(m, [&](const BoundaryNode& b) {
    const double xb = inner_x_nubar_b(m.space, b);
    return std::abs(newton_mu_mu(b, n, r)) *
           (std::sin(b.theta) + std::abs(std::cos(b.theta) * xb) + std::abs(xb * b.h_mumu));
  }));
  return std::abs(total) / std::max(scale, 1.0);
}

}  // namespace identities
}  // namespace capverify
