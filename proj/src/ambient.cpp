#include "capverify/ambient.hpp"

#include <cmath>

namespace capverify {
namespace ambient {

SpaceForm SpaceForm::euclidean_half_space(int ambient_dim) {
  if (ambient_dim < 2 || ambient_dim > 4)
    throw ArgumentError("SpaceForm: ambient dimension must be 2, 3 or 4");
  return SpaceForm{Model::EuclideanHalfSpace, 0.0, 0.0, 0.0, ambient_dim};
}

SpaceForm SpaceForm::hyperbolic_upper_half_space(int ambient_dim) {
  if (ambient_dim < 2 || ambient_dim > 4)
    throw ArgumentError("SpaceForm: ambient dimension must be 2, 3 or 4");
  return SpaceForm{Model::HyperbolicUpperHalfSpace, -1.0, 1.0, 1.0, ambient_dim};
}

void SpaceForm::validate_point(const Vec& p) const {
  if (p.dim != ambient_dim) throw ArgumentError("SpaceForm: point has wrong dimension");
  if (hyperbolic() && p[ambient_dim - 1] <= 1e-12)
    throw DomainError("SpaceForm: hyperbolic point must have positive last coordinate");
}

double SpaceForm::conformal_factor(const Vec& p) const {
  if (!hyperbolic()) return 1.0;
  const double h = p[ambient_dim - 1];
  return 1.0 / (h * h);
}

Mat SpaceForm::metric_at(const Vec& p) const {
  validate_point(p);
  return Mat::identity(ambient_dim).scaled(conformal_factor(p));
}

double SpaceForm::inner(const Vec& p, const Vec& a, const Vec& b) const {
  return conformal_factor(p) * dot(a, b);
}

Vec SpaceForm::christoffel_term(const Vec& p, const Vec& y, const Vec& z) const {
  if (!hyperbolic()) return zero_vec(ambient_dim);
  const int last = ambient_dim - 1;
  const double h = p[last];
  // -Y(ln x)Z - Z(ln x)Y + <Y,Z> D(ln x), with D(ln x) = E_{n+1}/x.
  Vec out = (-y[last] / h) * z + (-z[last] / h) * y;
  out[last] += dot(y, z) / h;
  return out;
}

Vec SpaceForm::support_normal(const Vec& p) const {
  Vec n(ambient_dim);
  n[ambient_dim - 1] = hyperbolic() ? -p[ambient_dim - 1] : -1.0;
  return n;
}

Vec covariant_derivative(const SpaceForm& space, const Vec& p, const FieldJet& y,
                         const FieldJet& z) {
  space.validate_point(p);
  if (y.value.dim != space.ambient_dim || z.value.dim != space.ambient_dim ||
      z.jacobian.rows() != space.ambient_dim || z.jacobian.cols() != space.ambient_dim)
    throw ArgumentError("covariant_derivative: jet data has wrong dimension");
  Vec flat(space.ambient_dim);
  for (int i = 0; i < space.ambient_dim; ++i) {
    double s = 0.0;
    for (int j = 0; j < space.ambient_dim; ++j) s += z.jacobian(i, j) * y.value[j];
    flat[i] = s;
  }
  return flat + space.christoffel_term(p, y.value, z.value);
}

CanonicalFields canonical_fields(const SpaceForm& space, const Vec& p) {
  space.validate_point(p);
  const int m = space.ambient_dim;
  CanonicalFields f;
  f.position = p;
  f.e_vertical = basis_vec(m, m - 1);
  f.x_shifted = p - f.e_vertical;
  f.potential = space.hyperbolic() ? 1.0 / p[m - 1] : 0.0;
  f.frame = Mat::identity(m);
  if (space.hyperbolic()) f.frame = f.frame.scaled(p[m - 1]);
  return f;
}

FieldJet canonical_field_jet(const SpaceForm& space, FieldTag tag, const Vec& p, int index) {
  space.validate_point(p);
  const int m = space.ambient_dim;
  FieldJet jet;
  jet.jacobian = Mat(m, m);
  switch (tag) {
    case FieldTag::Position:
      jet.value = p;
      jet.jacobian = Mat::identity(m);
      break;
    case FieldTag::EHorizontal:
      if (index < 0 || index >= m - 1) throw ArgumentError("canonical_field_jet: bad E_i index");
      jet.value = basis_vec(m, index);
      break;
    case FieldTag::EVertical:
      jet.value = basis_vec(m, m - 1);
      break;
    case FieldTag::XShifted:
      jet.value = p - basis_vec(m, m - 1);
      jet.jacobian = Mat::identity(m);
      break;
    default:
      throw ArgumentError("canonical_field_jet: unknown field tag");
  }
  return jet;
}

double killing_defect(const SpaceForm& space, FieldTag tag, const Vec& p, const Vec& a,
                      const Vec& b, int index) {
  if (!space.hyperbolic()) throw ArgumentError("killing_defect: hyperbolic model only");
  space.validate_point(p);
  const int m = space.ambient_dim;
  const FieldJet field = canonical_field_jet(space, tag, p, index);
  const FieldJet ja{a, Mat(m, m)};
  const FieldJet jb{b, Mat(m, m)};
  const Vec da = covariant_derivative(space, p, ja, field);
  const Vec db = covariant_derivative(space, p, jb, field);
  const double lie = 0.5 * (space.inner(p, da, b) + space.inner(p, db, a));
  double expected = 0.0;
  if (tag == FieldTag::EVertical) expected = -(1.0 / p[m - 1]) * space.inner(p, a, b);
  if (tag == FieldTag::XShifted) expected = (1.0 / p[m - 1]) * space.inner(p, a, b);
  return lie - expected;
}

double hessian_potential_residual(const SpaceForm& space, const Vec& p, const Vec& a,
                                  const Vec& b) {
  if (!space.hyperbolic()) throw ArgumentError("hessian_potential_residual: hyperbolic model only");
  space.validate_point(p);
  const int m = space.ambient_dim;
  const int last = m - 1;
  const double h = p[last];
  // V = 1/x_{n+1}: flat gradient and Hessian are explicit.
  Vec grad(m);
  grad[last] = -1.0 / (h * h);
  double hess = 0.0;
  // A^i B^j d2_{ij} V: only the (last,last) entry of d2 V is nonzero.
  hess += a[last] * b[last] * (2.0 / (h * h * h));
  // minus Gamma(A,B) applied to the gradient.
  const Vec gamma = space.christoffel_term(p, a, b);
  hess -= dot(gamma, grad);
  const double v = 1.0 / h;
  return hess - v * space.inner(p, a, b);
}

}  // namespace ambient
}  // namespace capverify
