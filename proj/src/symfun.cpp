#include "capverify/symfun.hpp"

#include <cmath>
#include <string>

namespace capverify {
namespace symfun {

CurvatureSpectrum::CurvatureSpectrum(std::vector<double> v) : values(std::move(v)) {
  if (values.empty()) throw ArgumentError("CurvatureSpectrum: needs at least one entry");
  for (double k : values)
    if (!std::isfinite(k)) throw ArgumentError("CurvatureSpectrum: entries must be finite");
}

ShapeOperator::ShapeOperator(Mat s, Mat g) : matrix(std::move(s)), metric(std::move(g)) {
  const int d = matrix.rows();
  if (d != matrix.cols() || d != metric.rows() || d != metric.cols())
    throw ArgumentError("ShapeOperator: square matrices of equal size required");
  Eigen ge = sym_eigen(metric, false);
  if (ge.values.front() <= 0.0)
    throw ArgumentError("ShapeOperator: metric is not positive definite");
  // g S must be symmetric: that is what self-adjointness w.r.t. g means.
  Mat gs = metric * matrix;
  double asym = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) asym = std::max(asym, std::abs(gs(i, j) - gs(j, i)));
  if (asym > 1e-12 * std::max(1.0, gs.max_abs()))
    throw ArgumentError("ShapeOperator: not self-adjoint with respect to the metric");
}

ShapeOperator ShapeOperator::diagonal(const std::vector<double>& kappa) {
  const int d = int(kappa.size());
  Mat s(d, d);
  for (int i = 0; i < d; ++i) s(i, i) = kappa[std::size_t(i)];
  return ShapeOperator(std::move(s), Mat::identity(d));
}

std::vector<double> ShapeOperator::principal_curvatures() const {
  // h v = kappa g v with h = g S.
  Mat h = metric * matrix;
  for (int i = 0; i < n(); ++i)
    for (int j = i + 1; j < n(); ++j) {
      const double m = 0.5 * (h(i, j) + h(j, i));
      h(i, j) = h(j, i) = m;
    }
  return gen_sym_eigen(h, metric, false).values;
}

std::vector<double> elementary_symmetric_all(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<double> e(n + 1, 0.0);
  e[0] = 1.0;
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t j = std::min(m + 1, n); j >= 1; --j) e[j] += values[m] * e[j - 1];
  return e;
}

double elementary_symmetric(const CurvatureSpectrum& spectrum, int r) {
  if (r < 0) throw ArgumentError("elementary_symmetric: r must be nonnegative");
  if (r > spectrum.n()) return 0.0;
  return elementary_symmetric_all(spectrum.values)[std::size_t(r)];
}

double normalized_mean_curvature(const CurvatureSpectrum& spectrum, int r) {
  if (r < 0 || r > spectrum.n())
    throw ArgumentError("normalized_mean_curvature: need 0 <= r <= n");
  return elementary_symmetric(spectrum, r) / binomial(spectrum.n(), r);
}

NewtonTensor newton_tensor(const ShapeOperator& shape, int r) {
  const int d = shape.n();
  if (r < 0 || r > d - 1) throw ArgumentError("newton_tensor: need 0 <= r <= n-1");
  const std::vector<double> sig = elementary_symmetric_all(shape.principal_curvatures());
  Mat p = Mat::identity(d);
  for (int k = 1; k <= r; ++k) {
    Mat ps = p * shape.matrix;
    p = Mat::identity(d).scaled(sig[std::size_t(k)]) - ps;
  }
  return NewtonTensor{r, std::move(p)};
}

NewtonTraces newton_traces(const ShapeOperator& shape, int r) {
  const int d = shape.n();
  const NewtonTensor p = newton_tensor(shape, r);
  const Mat ph = p.matrix * shape.matrix;
  const Mat ph2 = ph * shape.matrix;
  NewtonTraces t{p.matrix.trace(), ph.trace(), ph2.trace()};

  std::vector<double> sig = elementary_symmetric_all(shape.principal_curvatures());
  sig.resize(std::size_t(d) + 3, 0.0);  // sigma_{r} = 0 beyond n
  const double e1 = (d - r) * sig[std::size_t(r)];
  const double e2 = (r + 1) * sig[std::size_t(r) + 1];
  const double e3 = sig[1] * sig[std::size_t(r) + 1] - (r + 2) * sig[std::size_t(r) + 2];
  const double scale = 1.0 + std::abs(e1) + std::abs(e2) + std::abs(e3);
  if (std::abs(t.tr_p - e1) > 1e-10 * scale || std::abs(t.tr_ph - e2) > 1e-10 * scale ||
      std::abs(t.tr_ph2 - e3) > 1e-10 * scale)
    throw NumericalError("newton_traces: trace identities violated beyond 1e-10 relative");
  return t;
}

Mat sigma_gradient(const ShapeOperator& shape, int r) {
  const int d = shape.n();
  if (r < 1 || r > d) throw ArgumentError("sigma_gradient: need 1 <= r <= n");
  const std::vector<double> kappa = shape.principal_curvatures();

  Mat grad;
  if (r - 1 <= d - 1) {
    grad = newton_tensor(shape, r - 1).matrix;
  } else {
    grad = Mat(d, d);
  }

  // One-sided finite-difference cross-check on the eigenvalues:
  // d sigma_r / d kappa_i = sigma_{r-1}(kappa with kappa_i deleted).
  double scale = 1.0;
  for (double k : kappa) scale = std::max(scale, std::abs(k));
  const double step = 1.5e-8 * scale;
  const std::vector<double> expected = newton_eigenvalues(kappa, r - 1);
  double denom = 1.0;
  for (double e : expected) denom = std::max(denom, std::abs(e));
  for (int i = 0; i < d; ++i) {
    std::vector<double> bumped = kappa;
    bumped[std::size_t(i)] += step;
    const double fd = (elementary_symmetric_all(bumped)[std::size_t(r)] -
                       elementary_symmetric_all(kappa)[std::size_t(r)]) /
                      step;
    if (std::abs(fd - expected[std::size_t(i)]) > 1e-6 * denom)
      throw NumericalError("sigma_gradient: finite-difference check failed");
  }
  return grad;
}

bool garding_cone_contains(const CurvatureSpectrum& spectrum, int l) {
  if (l < 1 || l > spectrum.n()) throw ArgumentError("garding_cone_contains: need 1 <= l <= n");
  const std::vector<double> sig = elementary_symmetric_all(spectrum.values);
  for (int i = 1; i <= l; ++i)
    if (sig[std::size_t(i)] <= 0.0) return false;
  return true;
}

double newton_maclaurin_gap(const CurvatureSpectrum& spectrum, int k, int l) {
  const int d = spectrum.n();
  if (!(1 <= k && k < l && l <= d))
    throw ArgumentError("newton_maclaurin_gap: need 1 <= k < l <= n");
  if (!garding_cone_contains(spectrum, l))
    throw PreconditionError("newton_maclaurin_gap: spectrum outside the Garding cone of order " +
                            std::to_string(l));
  const double hk = normalized_mean_curvature(spectrum, k);
  const double hk1 = normalized_mean_curvature(spectrum, k - 1);
  const double hl = normalized_mean_curvature(spectrum, l);
  const double hl1 = normalized_mean_curvature(spectrum, l - 1);
  return hk * hl1 - hk1 * hl;
}

std::vector<double> newton_eigenvalues(const std::vector<double>& kappa, int r) {
  const int d = int(kappa.size());
  std::vector<double> out(static_cast<std::size_t>(d));
  std::vector<double> rest(std::size_t(d) - 1);
  for (int i = 0; i < d; ++i) {
    int c = 0;
    for (int j = 0; j < d; ++j)
      if (j != i) rest[std::size_t(c++)] = kappa[std::size_t(j)];
    const std::vector<double> sig = elementary_symmetric_all(rest);
    out[std::size_t(i)] = (r <= d - 1) ? sig[std::size_t(r)] : 0.0;
  }
  return out;
}

}  // namespace symfun
}  // namespace capverify
