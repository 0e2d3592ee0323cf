#pragma once

#include "capverify/stability.hpp"

namespace capverify {
namespace variation {

using immersion::DiscreteImmersion;
using immersion::SurfaceField;

// Decomposed variation field on one geometry: normal speed f and tangential
// part T at the interior and boundary nodes.
struct VariationField {
  std::vector<double> f;
  std::vector<Vec> t;
  std::vector<double> f_boundary;
  std::vector<Vec> t_boundary;
  double boundary_compat = 0.0;  // sup |g(T,mu) - cot(theta) f| on the boundary
};

// A variation re-evaluable on evolved geometries.
using VariationGenerator = std::function<VariationField(const DiscreteImmersion&)>;

VariationGenerator scaling_field();       // Y = x, Euclidean dilation about the origin
VariationGenerator unit_normal_field();   // f = 1, T = 0

// f = phi held fixed in parameter space; T = cot(theta) phi mu extended
// inward with the boundary cutoff, so the conormal compatibility holds
// exactly on the boundary.
VariationGenerator from_admissible(const stability::AdmissibleField& phi);

VariationField admissible_variation_from(const stability::AdmissibleField& phi,
                                         const DiscreteImmersion& m);

// Ambient geodesic step: exact lines in the Euclidean model, closed-form
// circular arcs in the upper-half-space model. Returns the endpoint and the
// parallel-transported velocity.
void geodesic_step(const ambient::SpaceForm& space, const Vec& p, const Vec& v, double t,
                   Vec& q, Vec& v_out);

struct StepDiagnostics {
  double dev_g = 0.0;
  double dev_nu = 0.0;
  double dev_h = 0.0;
  double dev_sigma = 0.0;
  double dev_density = 0.0;
};

// Final state of the evolution-equation ledger, for inspection next to the
// position-recomputed geometry.
struct LedgerState {
  std::vector<double> g, h;     // n*n blocks per node
  std::vector<Vec> nu;
  std::vector<double> sigma;    // n+1 entries per node
  std::vector<double> density;  // sqrt(det g)
};

struct FlowResult {
  std::vector<DiscreteImmersion> states;  // steps + 1 entries
  LedgerState ledger;                     // evolution-equation route, final time
  std::vector<StepDiagnostics> diagnostics;
  std::vector<double> times;
  std::vector<double> volume;         // accumulated volume sweep from t = 0
  std::vector<double> wetting0;       // accumulated support sweep from t = 0
  std::vector<double> volume_rate;    // int g(Y,nu) dA at each state
  std::vector<double> wetting0_rate;  // int g(Y,nubar) ds at each state
};

// Positions advance by one ambient geodesic step of the frozen field per
// time step; an independent ledger integrates the evolution equations of
// (g, nu, h, sigma_r, area density) with Simpson stages along the same
// motion and is compared against the recomputed geometry.
FlowResult evolve(const DiscreteImmersion& m, const VariationGenerator& gen, double dt,
                  int steps);

struct FunctionalSample {
  double t = 0.0;
  double volume = 0.0;
  std::vector<double> area_r;   // A_r = int sigma_r dA, r = 0..n-1
  std::vector<double> wetting;  // W_0..W_{n-1}
  std::vector<double> q_next;   // Q_{r+1}, r = 0..n-1
  std::vector<double> energy;   // E_0..E_n
};

// Functional ledger along a flow. The two assembly routes for Q_{r+1}
// (binomial-reduced and raw) are cross-checked to 1e-12 internally.
std::vector<FunctionalSample> functional_ledger(const FlowResult& flow);

struct RateCheck {
  double lhs = 0.0;       // Richardson-extrapolated finite difference
  double rhs = 0.0;       // closed form
  double residual = 0.0;  // |lhs-rhs| / (1 + max(|lhs|,|rhs|))
  double lhs_raw = 0.0;   // plain central difference at the given dt
  double residual_raw = 0.0;
  double angle_drift = 0.0;
};

// d/dt E_{r+1} against (n-r) int H_{r+1} f dA. The field must be
// angle-preserving at first order; the measured angle drift is returned.
RateCheck first_variation_check(const DiscreteImmersion& m, const VariationGenerator& gen,
                                int r, double dt);

// d/dt W_r against (1/sin theta) C(n,r)^{-1} int sigma_r^bdry f ds.
RateCheck wetting_rate_check(const DiscreteImmersion& m, const VariationGenerator& gen, int r,
                             double dt);

// d/dt V against int f dA.
RateCheck volume_rate_check(const DiscreteImmersion& m, const VariationGenerator& gen,
                            double dt);

}  // namespace variation
}  // namespace capverify
