#pragma once

#include "capverify/immersion.hpp"

namespace capverify {
namespace operators {

using immersion::DiscreteImmersion;
using immersion::Node;
using immersion::SurfaceField;

struct RobinData {
  std::vector<double> q;  // per boundary node
};

// Covariant Hessian of a sampled field: per node the n x n block
// nabla^2_{ij} f = d2_{ij} f - Gamma^k_{ij} d_k f. Row-major blocks of
// size n^2, concatenated over nodes.
std::vector<double> hessian_surface(const DiscreteImmersion& m, const SurfaceField& f);

// Parameter-space first derivatives (analytic if the field carries them).
std::vector<std::vector<double>> param_gradient(const DiscreteImmersion& m,
                                                const SurfaceField& f);

// L_r f = P_r^{ij} nabla^2_{ij} f.
SurfaceField L_r(const DiscreteImmersion& m, const SurfaceField& f, int r);

// J_r f = L_r f + tr(P_r h^2) f + K tr(P_r) f.
SurfaceField jacobi_J_r(const DiscreteImmersion& m, const SurfaceField& f, int r);

// Robin coefficient q = kappa_supp csc(theta) + cot(theta) h(mu, mu).
RobinData robin_q(const DiscreteImmersion& m);

// Normal derivative of a field at the boundary (one-sided stencils along
// the conormal direction; analytic data used when the field carries it).
std::vector<double> normal_derivative(const DiscreteImmersion& m, const SurfaceField& f);

// Newton tensor of order r at one node, as a mixed endomorphism.
void newton_mixed(const Node& node, int n, int r, double* out);

// tr(P_r) and tr(P_r h^2) from the nodal sigma values.
double trace_newton(const Node& node, int n, int r);
double trace_newton_h2(const Node& node, int n, int r);

// P_r(nabla f, nabla g) at every node from parameter gradients.
std::vector<double> newton_gradient_form(const DiscreteImmersion& m, int r,
                                         const std::vector<std::vector<double>>& df,
                                         const std::vector<std::vector<double>>& dg);

// A-priori roundoff scale of L_r applied to a field of the given sup scale,
// per node: machine noise run through the stencils and the inverse-metric
// contraction. Pointwise residuals below this floor are numerically
// meaningless (the effect concentrates at coordinate-pole neighbors).
std::vector<double> hessian_noise_floor(const DiscreteImmersion& m, double field_scale, int r);

struct IdentityResidual {
  std::string id;
  double residual;   // normalized sup-norm residual
  double lhs_scale;  // sup |lhs|
  double rhs_scale;  // sup |rhs|
};

// Pointwise differential identities for the canonical support functions;
// two in the Euclidean model, four in the hyperbolic one. The sigma-gradient
// terms are evaluated from the discrete field, so the identities are checked
// in their general (not necessarily constant-curvature) form.
std::vector<IdentityResidual> jacobi_identity_residuals(const DiscreteImmersion& m, int r);

// Boundary Robin identities for the same functions.
std::vector<IdentityResidual> robin_residuals(const DiscreteImmersion& m, int r);

struct EllipticityReport {
  bool h_r1_positive = false;    // H_{r+1} > 0 at every node
  bool elliptic_point = false;   // some node has all curvatures positive
  double min_newton_eigen = 0.;  // min over nodes and j <= r of eigenvalues of P_j
  double min_h_j = 0.;           // min over nodes and j <= r+1 of H_j
};

EllipticityReport ellipticity_report(const DiscreteImmersion& m, int r);

}  // namespace operators
}  // namespace capverify
