#pragma once

#include <string>

#include "capverify/linalg.hpp"

namespace capverify {
namespace ambient {

enum class Model { EuclideanHalfSpace, HyperbolicUpperHalfSpace };

// Ambient space form together with its support hypersurface:
// the hyperplane x_{n+1} = 0 (Euclidean) or the horosphere x_{n+1} = 1.
struct SpaceForm {
  Model model;
  double curvature;          // K: 0 or -1
  double support_curvature;  // kappa of the support hypersurface: 0 or 1
  double support_height;     // x_{n+1} value of the support
  int ambient_dim;           // n + 1

  static SpaceForm euclidean_half_space(int ambient_dim);
  static SpaceForm hyperbolic_upper_half_space(int ambient_dim);

  bool hyperbolic() const { return model == Model::HyperbolicUpperHalfSpace; }
  // tau = K + kappa^2; vanishes in both implemented scenarios but is kept
  // symbolic in the functional recursions.
  double tau() const { return curvature + support_curvature * support_curvature; }
  std::string name() const { return hyperbolic() ? "horoball" : "euclid"; }

  void validate_point(const Vec& p) const;

  // Metric matrix at p: identity, or delta / x_{n+1}^2.
  Mat metric_at(const Vec& p) const;
  double conformal_factor(const Vec& p) const;  // scalar A with gbar = A * delta
  double inner(const Vec& p, const Vec& a, const Vec& b) const;

  // Connection correction: nabla_Y Z = D_Y Z + christoffel_term(p, Y, Z).
  Vec christoffel_term(const Vec& p, const Vec& y, const Vec& z) const;

  // Support normal N at a support point: -E_{n+1} (Euclidean) or the
  // downward unit -x_{n+1} E_{n+1} (hyperbolic; equals -E_{n+1} at height 1).
  Vec support_normal(const Vec& p) const;
};

// First-order jet of a vector field at a point: value and flat Jacobian
// J(i, j) = d Z^i / d x^j.
struct FieldJet {
  Vec value;
  Mat jacobian;
};

// Covariant derivative of Z along Y(p) from the jets, per the conformal
// model formula; Euclidean model reduces to the flat derivative.
Vec covariant_derivative(const SpaceForm& space, const Vec& p, const FieldJet& y,
                         const FieldJet& z);

struct CanonicalFields {
  Vec position;       // x
  Vec e_vertical;     // E_{n+1}
  Vec x_shifted;      // X_{n+1} = x - E_{n+1}
  double potential;   // V_{n+1} = 1 / x_{n+1} (hyperbolic)
  Mat frame;          // columns: orthonormal basis E_A-bar = x_{n+1} E_A
};

CanonicalFields canonical_fields(const SpaceForm& space, const Vec& p);

enum class FieldTag { Position, EHorizontal, EVertical, XShifted };

// Jet of the tagged canonical field at p; index selects which horizontal
// E_i for FieldTag::EHorizontal.
FieldJet canonical_field_jet(const SpaceForm& space, FieldTag tag, const Vec& p, int index = 0);

// (1/2)[g(nabla_A X, B) + g(nabla_B X, A)] minus the expected value:
// zero for position and E_i, -(1/x_{n+1}) g(A,B) for E_{n+1},
// V_{n+1} g(A,B) for X_{n+1}. Hyperbolic model only.
double killing_defect(const SpaceForm& space, FieldTag tag, const Vec& p, const Vec& a,
                      const Vec& b, int index = 0);

// Hessian identity residual: (nabla^2 V_{n+1})(A,B) - V_{n+1} g(A,B).
double hessian_potential_residual(const SpaceForm& space, const Vec& p, const Vec& a,
                                  const Vec& b);

}  // namespace ambient
}  // namespace capverify
