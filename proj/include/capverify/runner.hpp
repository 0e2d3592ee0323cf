#pragma once

#include "capverify/report.hpp"

namespace capverify {
namespace runner {

struct RunConfig {
  std::vector<std::string> models = {"euclid", "horoball"};
  std::vector<int> n_list = {2, 3};
  std::vector<int> r_list;  // empty: all of 0..n-1 per n
  std::vector<double> theta_list;
  double lambda = 1.0;
  std::vector<int> resolutions = {16, 32, 64};
  int stability_resolution_2d = 40;
  int stability_resolution_3d = 24;
  int basis_size = 24;
  int random_fields = 20;
  double flow_dt = 0.01;
  double perturb_amplitude = 0.05;
  int perturb_mode = 2;
  int threads = 1;
  // tolerance overrides for the residual matrices
  double tol_integral = 1e-6;   // integral identities, finest grid
  double tol_pointwise = 1e-5;  // sup-norm differential identities
  // when set, the identity verifiers run on this one scenario instead of
  // the cap matrix (see immersion::patch_from_scenario for the syntax)
  std::string scenario;

  RunConfig();
  void validate() const;  // throws ArgumentError on schema violations
};

report::ReportFile run_minkowski(const RunConfig& config);
report::ReportFile run_convergence(const RunConfig& config);  // all identity sweeps
report::ReportFile run_boundary(const RunConfig& config);
report::ReportFile run_jacobi(const RunConfig& config);
report::ReportFile run_ambient(const RunConfig& config);
report::ReportFile run_stability(const RunConfig& config);
report::ReportFile run_gaps(const RunConfig& config);
report::ReportFile run_first_variation(const RunConfig& config);
report::ReportFile run_all(const RunConfig& config);

}  // namespace runner
}  // namespace capverify
