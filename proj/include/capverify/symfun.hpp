#pragma once

#include <vector>

#include "capverify/linalg.hpp"

namespace capverify {
namespace symfun {

// Vector of principal curvatures kappa_1..kappa_n.
struct CurvatureSpectrum {
  std::vector<double> values;

  explicit CurvatureSpectrum(std::vector<double> v);
  int n() const { return int(values.size()); }
};

// Shape operator stored as a g-self-adjoint endomorphism (mixed indices),
// together with the metric that makes it self-adjoint.
struct ShapeOperator {
  Mat matrix;  // n x n, S = g^{-1} h
  Mat metric;  // n x n SPD

  ShapeOperator(Mat s, Mat g);
  static ShapeOperator diagonal(const std::vector<double>& kappa);
  int n() const { return matrix.rows(); }
  std::vector<double> principal_curvatures() const;
};

struct NewtonTensor {
  int order = 0;
  Mat matrix;  // mixed endomorphism, same basis as the shape operator
};

// All elementary symmetric functions e_0..e_n of the given values,
// by the incremental one-element-at-a-time recurrence.
std::vector<double> elementary_symmetric_all(const std::vector<double>& values);

// sigma_r(kappa); sigma_0 = 1 and sigma_r = 0 for r > n.
double elementary_symmetric(const CurvatureSpectrum& spectrum, int r);

// H_r = sigma_r / C(n,r), 0 <= r <= n.
double normalized_mean_curvature(const CurvatureSpectrum& spectrum, int r);

// Newton tensor P_r from the recursion P_0 = I, P_r = sigma_r I - P_{r-1} S,
// with sigma_r taken from the eigenvalues of the shape operator. 0 <= r <= n-1.
NewtonTensor newton_tensor(const ShapeOperator& shape, int r);

struct NewtonTraces {
  double tr_p;     // (n-r) sigma_r
  double tr_ph;    // (r+1) sigma_{r+1}
  double tr_ph2;   // sigma_1 sigma_{r+1} - (r+2) sigma_{r+2}
};

// Traces of P_r, P_r h, P_r h^2; the closed forms above are asserted
// internally at 1e-10 relative.
NewtonTraces newton_traces(const ShapeOperator& shape, int r);

// d sigma_r / d h = P_{r-1}, 1 <= r <= n. Cross-checked against one-sided
// finite differences of sigma_r on the eigenvalues (1e-6 relative).
Mat sigma_gradient(const ShapeOperator& shape, int r);

// kappa in Garding cone: sigma_i(kappa) > 0 for 1 <= i <= l.
bool garding_cone_contains(const CurvatureSpectrum& spectrum, int l);

// H_k H_{l-1} - H_{k-1} H_l >= 0 for spectra in the Garding cone of order l;
// zero exactly on spectra proportional to (1,...,1).
double newton_maclaurin_gap(const CurvatureSpectrum& spectrum, int k, int l);

// Eigenvalues of P_r in the eigenbasis of the shape operator:
// sigma_r of kappa with the i-th entry deleted, for each i.
std::vector<double> newton_eigenvalues(const std::vector<double>& kappa, int r);

}  // namespace symfun
}  // namespace capverify
