#pragma once

#include "capverify/operators.hpp"

namespace capverify {
namespace stability {

using immersion::DiscreteImmersion;
using immersion::SurfaceField;

// Candidate member of the admissible space: mean-zero with the Robin
// condition at the boundary, both measured on the given discretization.
struct AdmissibleField {
  SurfaceField phi;
  double mean_residual = 0.0;   // |int phi dA|
  double robin_residual = 0.0;  // sup |d_mu phi - q phi|
  double scale = 0.0;           // sup |phi|
};

// Measure the admissibility residuals of a sampled field.
AdmissibleField admit(const DiscreteImmersion& m, SurfaceField phi);

struct QuadraticFormReport {
  double value = 0.0;  // second variation of the energy at this field
  double mean_residual = 0.0;
  double robin_residual = 0.0;
};

// Second variation (n-r) C(n,r+1)^{-1} times -int phi J_r phi dA, assembled
// in divergence form (gradient, boundary Robin and zeroth-order terms), which
// is symmetric by construction. `tol` gates the admissibility residuals
// relative to the field scale.
QuadraticFormReport quadratic_form(const DiscreteImmersion& m, const AdmissibleField& phi,
                                   int r, double tol = 1e-8);

// alpha * omega - H_{r+1} <x, nu>; identically zero on umbilical caps.
AdmissibleField test_function_euclidean(const DiscreteImmersion& m, int r);

// lambda * u - H_{r+1} g(X, nu); requires int u dA away from zero.
AdmissibleField test_function_horoball(const DiscreteImmersion& m, int r);

// Least Rayleigh value of the second variation over a Robin-compatible
// Galerkin subspace projected to mean zero.
double lowest_eigenvalue(const DiscreteImmersion& m, int r, int basis_size);

// Deterministic Robin-compatible basis pool on a cap (profiles pinned to the
// boundary condition in closed form), ordered by angular degree.
std::vector<SurfaceField> admissible_basis(const DiscreteImmersion& m, int count);

// Random mean-zero combination of the basis pool.
AdmissibleField random_admissible_field(const DiscreteImmersion& m, Rng& rng, int pool = 12);

struct RigidityGaps {
  // pointwise H_1 H_{r+1} - H_{r+2} over the nodes; enters the second
  // variation with coefficient (n-r-1), hence vacuous for r = n-1
  double newton_maclaurin_min = 0.0;
  double newton_maclaurin_max = 0.0;
  bool newton_maclaurin_vacuous = false;
  // (int (H_r/H_{r+1}) w)(int w H_1) / (int w)^2 - 1, Euclidean CMC only
  double hoelder_gap = 0.0;
  // pointwise psi*lambda - phi*H_{r+1} over the nodes, hyperbolic CMC only
  double pointwise_min = 0.0;
  double pointwise_max = 0.0;
  double lambda = 0.0;
  bool cmc = false;  // H_{r+1} constant: the integral/pointwise gaps apply
};

RigidityGaps rigidity_gap_report(const DiscreteImmersion& m, int r);

struct AuxiliaryResiduals {
  double l_phi = 0.0;           // L_r of -g(E,nu) against its closed form
  double l_psi = 0.0;           // L_r of -H_{r+1} V - lambda g(E,nu)
  double phi_boundary = 0.0;    // boundary value against -cos(theta)
  double phi_derivative = 0.0;  // d_mu against sin(theta) h(mu,mu)
  double psi_boundary = 0.0;    // boundary value against -H_{r+1} - lambda cos(theta)
  double psi_spread = 0.0;      // max - min over the interior nodes
};

AuxiliaryResiduals auxiliary_identity_residuals(const DiscreteImmersion& m, int r);

}  // namespace stability
}  // namespace capverify
