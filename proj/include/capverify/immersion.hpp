#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "capverify/ambient.hpp"
#include "capverify/grid.hpp"
#include "capverify/symfun.hpp"

namespace capverify {
namespace immersion {

using ambient::SpaceForm;

// Value and first/second parameter derivatives of the embedding at one
// parameter point.
struct PatchJet {
  Vec x;
  Vec d1[3];
  Vec d2[3][3];
};

struct CapInfo {
  double lambda = 0.0;         // umbilic principal curvature
  double theta = 0.0;          // contact angle
  double radius = 0.0;         // Euclidean radius of the model sphere
  double center_height = 0.0;  // last coordinate of the sphere center
  bool perturbed = false;
  double amplitude = 0.0;
  int mode = 0;
};

// Parametric hypersurface patch over a box, with the boundary edge (if any)
// at the upper end of parameter 0.
struct ParametricPatch {
  int n = 2;  // surface dimension
  SpaceForm space = SpaceForm::euclidean_half_space(3);
  double lo[3] = {0, 0, 0};
  double hi[3] = {1, 1, 1};
  bool periodic[3] = {false, false, false};
  bool has_boundary = true;
  bool analytic_derivatives = true;
  std::function<PatchJet(const double*)> jet;   // required when analytic
  std::function<Vec(const double*)> eval;       // required when not analytic
  std::function<Vec(const double*)> normal_ref; // Euclidean orientation hint
  double fd_step = 1e-4;                        // finite-difference fallback step
  std::optional<CapInfo> cap;
  std::string description;
};

struct Node {
  Vec x;
  Vec e[3];   // tangent frame d x / d u_i
  Vec nu;     // unit normal in the model metric
  double g[9];
  double ginv[9];
  double h[9];
  double kappa[3];
  double sigma[5];     // sigma_0..sigma_n of kappa
  double sqrt_det_g;
  double w;            // quadrature weight including the area density
  double gamma[27];    // Christoffels of the induced metric, [k][i][j]
};

struct BoundaryNode {
  Vec x;
  Vec e[3];       // e[0): parameter-0 tangent; e[1..n-1): boundary tangents
  Vec nu, mu, nubar, nbar;
  double theta;
  double w;             // boundary quadrature weight including density
  double g[9];          // full induced metric at the boundary point
  double h[9];          // full second fundamental form
  double mu_comp[3];    // parameter components of mu
  double h_mumu;
  double kappa_res[2];  // principal curvatures of M restricted to T(boundary)
  double ghat[4];       // metric of the boundary in its tangent frame
  double hhat[4];       // second fundamental form of the boundary in the support
  double kappa_hat[2];  // principal curvatures of the boundary in the support
  double max_h_e_mu;    // max |h(e_alpha, mu)|: principal-direction residual
};

struct DiscreteImmersion {
  SpaceForm space = SpaceForm::euclidean_half_space(3);
  int n = 2;
  int resolution = 0;
  TensorShape shape;           // interior tensor layout
  TensorShape boundary_shape;  // transverse layout (dims 1..n-1)
  Grid1D grids[3];
  std::vector<Node> nodes;
  std::vector<BoundaryNode> boundary;
  std::optional<CapInfo> cap;
  std::string description;

  bool has_boundary() const { return !boundary.empty(); }
  double theta() const;  // mean contact angle (boundary required)
  double area() const;
  double boundary_measure() const;

  // Parameter coordinates of the flat-indexed interior/boundary node.
  void node_params(int flat, double* u) const;
  void boundary_params(int flat, double* u) const;

  // Derivative of interior samples along parameter dimension d.
  std::vector<double> differentiate(const std::vector<double>& values, int d, int order) const;
  // Derivative of boundary samples along boundary (transverse) dimension d >= 1.
  std::vector<double> boundary_differentiate(const std::vector<double>& values, int d,
                                             int order) const;
  // One-sided parameter-0 derivative at the boundary from interior samples
  // plus the boundary samples themselves.
  std::vector<double> boundary_d0(const std::vector<double>& interior,
                                  const std::vector<double>& bvals, int order = 1) const;
  // Interpolation of interior samples to the boundary edge.
  std::vector<double> boundary_interpolate(const std::vector<double>& interior) const;
};

// Scalar field sampled on a DiscreteImmersion's node sets.
struct SurfaceField {
  std::vector<double> interior;
  std::vector<double> boundary;
  // Optional analytic data; empty means "sampled only".
  std::vector<std::vector<double>> d_interior;  // parameter derivatives, size n when present
  std::vector<double> dmu_boundary;             // normal derivative at the boundary
  bool analytic = false;
};

SurfaceField make_field(const DiscreteImmersion& m,
                        const std::function<double(const Node&)>& f,
                        const std::function<double(const BoundaryNode&)>& fb);

// Quadrature with pairwise deterministic reduction.
double integrate(const DiscreteImmersion& m, const SurfaceField& f);
double integrate(const DiscreteImmersion& m, const std::vector<double>& interior_values);
double integrate_boundary(const DiscreteImmersion& m, const SurfaceField& f);
double integrate_boundary(const DiscreteImmersion& m, const std::vector<double>& bvalues);

DiscreteImmersion discretize(const ParametricPatch& patch, int resolution);

// Umbilical cap with curvature lambda meeting the support at angle theta.
ParametricPatch cap_family(const SpaceForm& space, int n, double lambda, double theta);

// Normal-graph perturbation with a cutoff vanishing to second order at the
// boundary edge; boundary position, frames and contact angle are unchanged.
ParametricPatch perturbed_cap(const ParametricPatch& cap, double amplitude, int mode);

// Closed round sphere (no boundary); Euclidean model only.
ParametricPatch closed_sphere(int n, double lambda);

// Scenario strings: "euclid-cap:n=2,lambda=1,theta=1.0472",
// "horoball-cap:...", "perturbed:euclid-cap:...,amp=0.05,mode=2",
// "closed-sphere:n=2,lambda=1".
ParametricPatch patch_from_scenario(const std::string& scenario);

// Pointwise scalar helpers.
double inner_x_nu(const SpaceForm& s, const Node& node);
double inner_E_nu(const SpaceForm& s, const Node& node);
double inner_X_nu(const SpaceForm& s, const Node& node);
double potential(const SpaceForm& s, const Node& node);
double inner_x_nu_b(const SpaceForm& s, const BoundaryNode& node);
double inner_E_nu_b(const SpaceForm& s, const BoundaryNode& node);
double inner_X_nu_b(const SpaceForm& s, const BoundaryNode& node);
double potential_b(const SpaceForm& s, const BoundaryNode& node);
double inner_x_nubar_b(const SpaceForm& s, const BoundaryNode& node);
double inner_x_mu_b(const SpaceForm& s, const BoundaryNode& node);

// sigma_r of the boundary-restricted principal curvatures (the Newton-tensor
// entry in the conormal direction, valid because mu is principal).
double newton_mu_mu(const BoundaryNode& node, int n, int r);

// sigma_l of the boundary's own principal curvatures in the support.
double boundary_sigma(const BoundaryNode& node, int n, int l);

// Rebuild full geometry from moved node positions, reusing the reference
// grid layout. Orientation follows the reference normals; support-contact
// invariants are not enforced (evolved surfaces drift at second order).
DiscreteImmersion rebuild_from_positions(const DiscreteImmersion& ref,
                                         const std::vector<Vec>& interior_pos,
                                         const std::vector<Vec>& boundary_pos);

}  // namespace immersion
}  // namespace capverify
