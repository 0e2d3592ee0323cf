#include "capverify/report.hpp"

#include <cmath>

#include <json.hpp>

namespace capverify {
namespace report {

double estimate_order(const std::vector<double>& residuals, double floor) {
  double sum = 0.0;
  int count = 0;
  for (std::size_t i = 0; i + 1 < residuals.size(); ++i) {
    if (residuals[i] <= floor) continue;
    const double next = std::max(residuals[i + 1], 1e-300);
    sum += std::log2(residuals[i] / next);
    ++count;
  }
  if (count == 0) return kOrderConverged;
  return sum / count;
}

void finalize_decay(VerificationReport& rep, double tolerance, double min_order, double floor) {
  rep.kind = CheckKind::ResidualDecay;
  rep.tolerance = tolerance;
  rep.min_order = min_order;
  rep.floor = floor;
  rep.order = estimate_order(rep.residuals, floor);
  const double finest = rep.residuals.empty() ? 0.0 : rep.residuals.back();
  rep.pass = finest <= tolerance &&
             (rep.order >= min_order || rep.order == kOrderConverged);
}

void finalize_single(VerificationReport& rep, double value, double tolerance, CheckKind kind) {
  rep.kind = kind;
  rep.tolerance = tolerance;
  rep.residuals = {value};
  rep.order = 0.0;
  rep.pass = (kind == CheckKind::LowerBound) ? value >= -tolerance : std::abs(value) <= tolerance;
}

namespace {

nlohmann::ordered_json record_json(const VerificationReport& rep) {
  nlohmann::ordered_json j;
  j["identity"] = rep.identity;
  j["model"] = rep.model;
  j["n"] = rep.n;
  j["r"] = rep.r;
  j["theta"] = rep.theta;
  j["lambda"] = rep.lambda;
  switch (rep.kind) {
    case CheckKind::ResidualDecay: j["kind"] = "residual-decay"; break;
    case CheckKind::ResidualSingle: j["kind"] = "residual"; break;
    case CheckKind::LowerBound: j["kind"] = "lower-bound"; break;
  }
  j["resolutions"] = rep.resolutions;
  j["residuals"] = rep.residuals;
  if (rep.kind == CheckKind::ResidualDecay) {
    j["order"] = rep.order;
    j["min_order"] = rep.min_order;
    j["floor"] = rep.floor;
  }
  j["tolerance"] = rep.tolerance;
  j["verdict"] = rep.pass ? "pass" : "fail";
  if (!rep.notes.empty()) j["notes"] = rep.notes;
  return j;
}

}  // namespace

std::string to_json_line(const VerificationReport& rep) { return record_json(rep).dump(); }

std::string ReportFile::serialize() const {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["tool"] = "capverify";
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const VerificationReport& rep : records) arr.push_back(record_json(rep));
  j["records"] = arr;
  int passed = 0;
  for (const VerificationReport& rep : records) passed += rep.pass ? 1 : 0;
  j["summary"] = {{"total", records.size()}, {"passed", passed}};
  return j.dump(2) + "\n";
}

bool ReportFile::all_pass() const {
  for (const VerificationReport& rep : records)
    if (!rep.pass) return false;
  return true;
}

const VerificationReport* ReportFile::first_failure() const {
  for (const VerificationReport& rep : records)
    if (!rep.pass) return &rep;
  return nullptr;
}

}  // namespace report
}  // namespace capverify
