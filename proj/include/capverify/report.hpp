#pragma once

#include <string>
#include <vector>

#include "capverify/common.hpp"

namespace capverify {
namespace report {

// Sentinel order reported when every level sits below the measurement
// floor, so no ratio is meaningful; it counts as converged.
constexpr double kOrderConverged = 99.0;

enum class CheckKind {
  ResidualDecay,   // residual per resolution; needs order + finest <= tol
  ResidualSingle,  // one |value| <= tol check
  LowerBound,      // one value >= -tol check
};

struct VerificationReport {
  std::string identity;
  std::string model;  // "euclid" or "horoball"
  int n = 0;
  int r = -1;          // -1 when not applicable
  double theta = 0.0;  // 0 when not applicable
  double lambda = 0.0;
  CheckKind kind = CheckKind::ResidualDecay;
  std::vector<int> resolutions;
  std::vector<double> residuals;
  double order = 0.0;
  double tolerance = 0.0;
  double min_order = 2.0;
  double floor = 0.0;
  bool pass = false;
  std::string notes;
};

// Mean of log2 ratios over consecutive pairs whose leading residual is
// above the floor; kOrderConverged when no pair is measurable.
double estimate_order(const std::vector<double>& residuals, double floor);

// Fill order/pass for a decay report; residuals must be ordered by
// increasing resolution.
void finalize_decay(VerificationReport& rep, double tolerance, double min_order, double floor);

void finalize_single(VerificationReport& rep, double value, double tolerance, CheckKind kind);

std::string to_json_line(const VerificationReport& rep);

struct ReportFile {
  std::vector<VerificationReport> records;
  std::string serialize() const;  // deterministic, full-precision
  bool all_pass() const;
  const VerificationReport* first_failure() const;
};

}  // namespace report
}  // namespace capverify
