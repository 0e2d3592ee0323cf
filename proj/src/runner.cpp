#include "capverify/runner.hpp"

#include <cmath>
#include <future>
#include <map>

#include "capverify/identities.hpp"
#include "capverify/variation.hpp"

namespace capverify {
namespace runner {

using immersion::cap_family;
using immersion::closed_sphere;
using immersion::DiscreteImmersion;
using immersion::discretize;
using immersion::ParametricPatch;
using immersion::perturbed_cap;
using report::CheckKind;
using report::ReportFile;
using report::VerificationReport;

namespace {

constexpr double kMinOrder = 2.0;

ambient::SpaceForm space_of(const std::string& model, int n) {
  if (model == "euclid") return ambient::SpaceForm::euclidean_half_space(n + 1);
  if (model == "horoball") return ambient::SpaceForm::hyperbolic_upper_half_space(n + 1);
  throw ArgumentError("unknown model: " + model);
}

std::vector<int> r_values(const RunConfig& config, int n) {
  if (config.r_list.empty()) {
    std::vector<int> out;
    for (int r = 0; r < n; ++r) out.push_back(r);
    return out;
  }
  std::vector<int> out;
  for (int r : config.r_list)
    if (r >= 0 && r < n) out.push_back(r);
  return out;
}

VerificationReport base_report(const std::string& id, const std::string& model, int n, int r,
                               double theta, double lambda) {
  VerificationReport rep;
  rep.identity = id;
  rep.model = model;
  rep.n = n;
  rep.r = r;
  rep.theta = theta;
  rep.lambda = lambda;
  return rep;
}

// One group of the identity matrix over one patch: builds each resolution
// once and shares it across every identity and r.
std::vector<VerificationReport> identity_group_for_patch(
    const RunConfig& config, const ParametricPatch& patch, const std::string& model,
    double theta, bool minkowski, bool boundary, bool jacobi, bool with_perturbed) {
  const bool hyp = patch.space.hyperbolic();
  const int n = patch.n;
  const std::vector<int> rs = r_values(config, n);

  std::map<std::string, VerificationReport> records;
  auto record_for = [&](const std::string& id, int r) -> VerificationReport& {
    const std::string key = id + "#" + std::to_string(r);
    auto it = records.find(key);
    if (it == records.end()) {
      it = records.emplace(key, base_report(id, model, n, r, theta, config.lambda)).first;
      it->second.resolutions = config.resolutions;
    }
    return it->second;
  };

  for (int res : config.resolutions) {
    const DiscreteImmersion m = discretize(patch, res);
    if (minkowski) {
      for (int r : rs)
        record_for("minkowski", r).residuals.push_back(
            hyp ? identities::minkowski_horoball(m, r) : identities::minkowski_euclidean(m, r));
      // the cap integrand vanishes pointwise, so the integral cancellation
      // is exercised on a non-umbilical constant-angle perturbation as well
      if (with_perturbed) {
        const ParametricPatch perturbed = perturbed_cap(
            patch, config.perturb_amplitude * patch.cap->radius, config.perturb_mode);
        const DiscreteImmersion mp = discretize(perturbed, res);
        for (int r : rs)
          record_for("minkowski-perturbed", r).residuals.push_back(
              hyp ? identities::minkowski_horoball(mp, r)
                  : identities::minkowski_euclidean(mp, r));
      }
    }
    if (boundary && hyp) {
      for (int r : rs) {
        record_for("boundary-flux-1", r).residuals.push_back(identities::boundary_flux_1(m, r));
        record_for("boundary-flux-2", r).residuals.push_back(identities::boundary_flux_2(m, r));
        const double spread = identities::sigma_spread(m, r + 1);
        if (spread <= 1e-8)
          record_for("cmc-boundary", r).residuals.push_back(
              identities::cmc_boundary_identity(m, r));
      }
    }
    if (jacobi) {
      for (int r : rs)
        for (const operators::IdentityResidual& ir : operators::jacobi_identity_residuals(m, r))
          record_for(ir.id, r).residuals.push_back(ir.residual);
      for (const operators::IdentityResidual& ir : operators::robin_residuals(m, 0))
        record_for(ir.id, -1).residuals.push_back(ir.residual);
    }
  }

  std::vector<VerificationReport> out;
  for (auto& [key, rep] : records) {
    const bool pointwise =
        rep.identity.rfind("jacobi", 0) == 0 || rep.identity.rfind("robin", 0) == 0;
    const double tol = pointwise ? config.tol_pointwise : config.tol_integral;
    report::finalize_decay(rep, tol, kMinOrder, tol * 1e-2);
    out.push_back(std::move(rep));
  }
  return out;
}

std::vector<VerificationReport> identity_group(const RunConfig& config, const std::string& model,
                                               int n, double theta, bool minkowski,
                                               bool boundary, bool jacobi) {
  const ambient::SpaceForm space = space_of(model, n);
  const ParametricPatch patch = cap_family(space, n, config.lambda, theta);
  return identity_group_for_patch(config, patch, model, theta, minkowski, boundary, jacobi,
                                  true);
}

ReportFile run_identity_matrix(const RunConfig& config, bool minkowski, bool boundary,
                               bool jacobi) {
  config.validate();
  ReportFile out;
  if (!config.scenario.empty()) {
    const ParametricPatch patch = immersion::patch_from_scenario(config.scenario);
    if (!patch.has_boundary)
      throw ArgumentError("config: identity verifiers need a scenario with boundary");
    const DiscreteImmersion probe = discretize(patch, config.resolutions.front());
    for (VerificationReport& rep :
         identity_group_for_patch(config, patch, patch.space.name(), probe.theta(), minkowski,
                                  boundary && patch.space.hyperbolic(), jacobi, false))
      out.records.push_back(std::move(rep));
    return out;
  }
  struct Group {
    std::string model;
    int n;
    double theta;
  };
  std::vector<Group> groups;
  for (const std::string& model : config.models) {
    if (boundary && !minkowski && !jacobi && model != "horoball") continue;
    for (int n : config.n_list)
      for (double theta : config.theta_list) groups.push_back({model, n, theta});
  }
  std::vector<std::vector<VerificationReport>> results(groups.size());
  if (config.threads > 1) {
    std::vector<std::future<std::vector<VerificationReport>>> futures;
    std::size_t next = 0;
    while (next < groups.size()) {
      const std::size_t batch = std::min<std::size_t>(config.threads, groups.size() - next);
      futures.clear();
      for (std::size_t k = 0; k < batch; ++k) {
        const Group g = groups[next + k];
        futures.push_back(std::async(std::launch::async, [&, g] {
          return identity_group(config, g.model, g.n, g.theta, minkowski, boundary, jacobi);
        }));
      }
      for (std::size_t k = 0; k < batch; ++k) results[next + k] = futures[k].get();
      next += batch;
    }
  } else {
    for (std::size_t i = 0; i < groups.size(); ++i)
      results[i] = identity_group(config, groups[i].model, groups[i].n, groups[i].theta,
                                  minkowski, boundary, jacobi);
  }
  for (std::vector<VerificationReport>& batch : results)
    for (VerificationReport& rep : batch) out.records.push_back(std::move(rep));
  return out;
}

double natural_test_function_scale(const immersion::CapInfo& cap, int r) {
  return std::pow(cap.lambda, r) + std::pow(cap.lambda, r + 1) * 2.0 * cap.radius;
}

}  // namespace

RunConfig::RunConfig() { theta_list = {kPi / 3, kPi / 2, 2 * kPi / 3}; }

void RunConfig::validate() const {
  if (models.empty() || n_list.empty() || theta_list.empty() || resolutions.empty())
    throw ArgumentError("config: every list must be nonempty");
  for (const std::string& model : models)
    if (model != "euclid" && model != "horoball")
      throw ArgumentError("config: unknown model " + model);
  for (int n : n_list)
    if (n != 2 && n != 3) throw ArgumentError("config: n must be 2 or 3");
  for (std::size_t i = 1; i < resolutions.size(); ++i)
    if (resolutions[i] <= resolutions[i - 1])
      throw ArgumentError("config: resolutions must be strictly increasing");
  for (int res : resolutions)
    if (res < 8) throw ArgumentError("config: resolutions must be at least 8");
  for (double theta : theta_list)
    if (!(theta > 0.0 && theta < kPi)) throw ArgumentError("config: theta outside (0, pi)");
  if (!(lambda > 0.0)) throw ArgumentError("config: lambda must be positive");
  if (threads < 1) throw ArgumentError("config: thread count must be positive");
}

ReportFile run_minkowski(const RunConfig& config) {
  return run_identity_matrix(config, true, false, false);
}

ReportFile run_boundary(const RunConfig& config) {
  RunConfig c = config;
  c.models = {"horoball"};
  return run_identity_matrix(c, false, true, false);
}

ReportFile run_jacobi(const RunConfig& config) {
  return run_identity_matrix(config, false, false, true);
}

ReportFile run_convergence(const RunConfig& config) {
  return run_identity_matrix(config, true, true, true);
}

ReportFile run_ambient(const RunConfig& config) {
  config.validate();
  ReportFile out;
  for (int n : config.n_list) {
    const ambient::SpaceForm hy = ambient::SpaceForm::hyperbolic_upper_half_space(n + 1);
    Rng rng(0x9e3779b9u + static_cast<std::uint64_t>(n));
    const int samples = 100;
    double worst[6] = {0, 0, 0, 0, 0, 0};
    for (int trial = 0; trial < samples; ++trial) {
      Vec p(n + 1), a(n + 1), b(n + 1);
      for (int i = 0; i < n; ++i) p[i] = rng.uniform(-2.0, 2.0);
      p[n] = rng.uniform(0.2, 3.0);
      for (int i = 0; i <= n; ++i) {
        a[i] = rng.uniform(-1.0, 1.0);
        b[i] = rng.uniform(-1.0, 1.0);
      }
      using ambient::FieldTag;
      worst[0] = std::max(worst[0],
                          std::abs(killing_defect(hy, FieldTag::Position, p, a, b)));
      for (int i = 0; i < n; ++i)
        worst[1] = std::max(worst[1],
                            std::abs(killing_defect(hy, FieldTag::EHorizontal, p, a, b, i)));
      worst[2] = std::max(worst[2],
                          std::abs(killing_defect(hy, FieldTag::EVertical, p, a, b)));
      worst[3] = std::max(worst[3],
                          std::abs(killing_defect(hy, FieldTag::XShifted, p, a, b)));
      worst[4] = std::max(worst[4], std::abs(ambient::hessian_potential_residual(hy, p, a, b)));
      // horosphere relations: tangency of the shifted field and the normal
      // derivative of the potential
      Vec ph = p;
      ph[n] = 1.0;
      const ambient::CanonicalFields f = ambient::canonical_fields(hy, ph);
      const Vec nbar = hy.support_normal(ph);
      worst[5] = std::max(worst[5], std::abs(hy.inner(ph, f.x_shifted, nbar)));
      worst[5] = std::max(worst[5], std::abs(-nbar[n] / (ph[n] * ph[n]) - f.potential));
    }
    const char* ids[6] = {"killing-position", "killing-horizontal", "conformal-vertical",
                          "conformal-shifted", "hessian-potential", "horosphere-relations"};
    for (int k = 0; k < 6; ++k) {
      VerificationReport rep = base_report(ids[k], "horoball", n, -1, 0.0, 0.0);
      rep.resolutions = {samples};
      report::finalize_single(rep, worst[k], 1e-10, CheckKind::ResidualSingle);
      out.records.push_back(std::move(rep));
    }
  }
  return out;
}

ReportFile run_stability(const RunConfig& config) {
  config.validate();
  ReportFile out;
  for (const std::string& model : config.models) {
    for (int n : config.n_list) {
      const ambient::SpaceForm space = space_of(model, n);
      const int res = (n == 2) ? config.stability_resolution_2d : config.stability_resolution_3d;
      for (double theta : config.theta_list) {
        const ParametricPatch patch = cap_family(space, n, config.lambda, theta);
        const DiscreteImmersion m = discretize(patch, res);
        const double area = m.area();

        // test-function vanishing
        for (int r : r_values(config, n)) {
          stability::AdmissibleField phi =
              space.hyperbolic() ? stability::test_function_horoball(m, r)
                                 : stability::test_function_euclidean(m, r);
          VerificationReport rep =
              base_report("test-function-sup", model, n, r, theta, config.lambda);
          rep.resolutions = {res};
          report::finalize_single(rep, phi.scale / natural_test_function_scale(*m.cap, r), 1e-8,
                                  CheckKind::ResidualSingle);
          out.records.push_back(std::move(rep));
        }

        if (space.hyperbolic()) {
          const double ct = std::cos(m.theta());
          std::vector<double> u(m.nodes.size());
          for (std::size_t i = 0; i < m.nodes.size(); ++i)
            u[i] = immersion::potential(space, m.nodes[i]) -
                   ct * immersion::inner_x_nu(space, m.nodes[i]);
          VerificationReport rep =
              base_report("u-normalizer", model, n, -1, theta, config.lambda);
          rep.resolutions = {res};
          report::finalize_single(rep, std::abs(integrate(m, u)) / area - 1e-3, 0.0,
                                  CheckKind::LowerBound);
          out.records.push_back(std::move(rep));
        }

        // cap reduction over random admissible fields
        Rng rng(0xabcdef12u + static_cast<std::uint64_t>(n * 7) +
                static_cast<std::uint64_t>(theta * 1000));
        double worst_reduction = 0.0;
        for (int trial = 0; trial < config.random_fields; ++trial) {
          stability::AdmissibleField phi = stability::random_admissible_field(m, rng, 8);
          const double q0 = stability::quadratic_form(m, phi, 0).value;
          // guard against fields whose quadratic form crosses zero
          const double denom = std::max(std::abs(q0), 1e-2 * area * phi.scale * phi.scale);
          for (int r = 1; r < n; ++r) {
            const double qr = stability::quadratic_form(m, phi, r).value;
            const double factor =
                double((r + 1) * (n - r)) / n * std::pow(config.lambda, r);
            worst_reduction = std::max(worst_reduction, std::abs(qr - factor * q0) / denom);
          }
        }
        if (n >= 2) {
          VerificationReport rep =
              base_report("cap-reduction", model, n, -1, theta, config.lambda);
          rep.resolutions = {res};
          report::finalize_single(rep, worst_reduction, 1e-4, CheckKind::ResidualSingle);
          out.records.push_back(std::move(rep));
        }

        // lowest eigenvalue; Euclidean scale Lambda^{r+2} * area, hyperbolic
        // one with the curvature shifted by the ambient contribution
        for (int r : r_values(config, n)) {
          const double lam = stability::lowest_eigenvalue(m, r, config.basis_size);
          const double scale = area * (space.hyperbolic()
                                           ? std::pow(1.0 + config.lambda, r + 2)
                                           : std::pow(config.lambda, r + 2));
          VerificationReport rep = base_report("lambda-min", model, n, r, theta, config.lambda);
          rep.resolutions = {res};
          report::finalize_single(rep, lam / scale, 1e-5, CheckKind::LowerBound);
          out.records.push_back(std::move(rep));
        }

        // auxiliary function identities (hyperbolic only): residual sweep
        if (space.hyperbolic()) {
          std::vector<VerificationReport> aux_reports;
          for (int r : r_values(config, n))
            aux_reports.push_back(
                base_report("auxiliary-identities", model, n, r, theta, config.lambda));
          for (int sweep_res : config.resolutions) {
            const DiscreteImmersion ms = discretize(patch, sweep_res);
            std::size_t slot = 0;
            for (int r : r_values(config, n)) {
              const stability::AuxiliaryResiduals aux =
                  stability::auxiliary_identity_residuals(ms, r);
              aux_reports[slot].resolutions.push_back(sweep_res);
              aux_reports[slot].residuals.push_back(
                  std::max({aux.l_phi, aux.l_psi, aux.phi_boundary, aux.phi_derivative,
                            aux.psi_boundary, aux.psi_spread}));
              ++slot;
            }
          }
          for (VerificationReport& rep : aux_reports) {
            report::finalize_decay(rep, 1e-4, kMinOrder, 1e-7);
            out.records.push_back(std::move(rep));
          }
        }
      }
    }
  }
  return out;
}

ReportFile run_gaps(const RunConfig& config) {
  config.validate();
  ReportFile out;
  for (const std::string& model : config.models) {
    for (int n : config.n_list) {
      const ambient::SpaceForm space = space_of(model, n);
      const int res = (n == 2) ? config.stability_resolution_2d : config.stability_resolution_3d;
      for (double theta : config.theta_list) {
        const DiscreteImmersion m = discretize(cap_family(space, n, config.lambda, theta), res);
        for (int r : r_values(config, n)) {
          const stability::RigidityGaps g = stability::rigidity_gap_report(m, r);
          if (!g.newton_maclaurin_vacuous) {
            VerificationReport lo = base_report("gap-curvature-min", model, n, r, theta,
                                                config.lambda);
            lo.resolutions = {res};
            report::finalize_single(lo, g.newton_maclaurin_min, 1e-8, CheckKind::LowerBound);
            out.records.push_back(std::move(lo));
            VerificationReport um = base_report("gap-curvature-umbilical", model, n, r, theta,
                                                config.lambda);
            um.resolutions = {res};
            report::finalize_single(
                um, std::max(std::abs(g.newton_maclaurin_min), std::abs(g.newton_maclaurin_max)),
                1e-8, CheckKind::ResidualSingle);
            out.records.push_back(std::move(um));
          }
          if (!space.hyperbolic()) {
            VerificationReport hg = base_report("gap-hoelder", model, n, r, theta, config.lambda);
            hg.resolutions = {res};
            report::finalize_single(hg, g.hoelder_gap, 1e-8, CheckKind::LowerBound);
            out.records.push_back(std::move(hg));
            VerificationReport hu =
                base_report("gap-hoelder-umbilical", model, n, r, theta, config.lambda);
            hu.resolutions = {res};
            report::finalize_single(hu, std::abs(g.hoelder_gap), 1e-8,
                                    CheckKind::ResidualSingle);
            out.records.push_back(std::move(hu));
          } else {
            VerificationReport pg =
                base_report("gap-quadratic-min", model, n, r, theta, config.lambda);
            pg.resolutions = {res};
            report::finalize_single(pg, g.pointwise_min, 1e-8, CheckKind::LowerBound);
            out.records.push_back(std::move(pg));
            VerificationReport pu =
                base_report("gap-quadratic-umbilical", model, n, r, theta, config.lambda);
            pu.resolutions = {res};
            report::finalize_single(
                pu, std::max(std::abs(g.pointwise_min), std::abs(g.pointwise_max)), 1e-8,
                CheckKind::ResidualSingle);
            out.records.push_back(std::move(pu));
          }
        }
      }
      // perturbed caps: the curvature gap must be strictly positive somewhere
      const double theta_p = kPi / 3;
      const ParametricPatch pert = perturbed_cap(cap_family(space, n, config.lambda, theta_p),
                                                 config.perturb_amplitude, config.perturb_mode);
      const DiscreteImmersion mp = discretize(pert, res);
      for (int r : r_values(config, n)) {
        if (r == n - 1) continue;  // vacuous coefficient
        const stability::RigidityGaps g = stability::rigidity_gap_report(mp, r);
        VerificationReport lo =
            base_report("gap-curvature-min-perturbed", model, n, r, theta_p, config.lambda);
        lo.resolutions = {res};
        report::finalize_single(lo, g.newton_maclaurin_min, 1e-8, CheckKind::LowerBound);
        out.records.push_back(std::move(lo));
        VerificationReport hi =
            base_report("gap-curvature-positive-perturbed", model, n, r, theta_p, config.lambda);
        hi.resolutions = {res};
        report::finalize_single(hi, g.newton_maclaurin_max - 1e-4, 0.0, CheckKind::LowerBound);
        out.records.push_back(std::move(hi));
      }
    }
  }
  return out;
}

ReportFile run_first_variation(const RunConfig& config) {
  config.validate();
  ReportFile out;
  const double dt = config.flow_dt;

  auto push_rate = [&](const std::string& id, const std::string& model, int n, int r,
                       double theta, const variation::RateCheck& rc, double tol) {
    VerificationReport rep = base_report(id, model, n, r, theta, config.lambda);
    rep.resolutions = {};
    rep.notes = "lhs " + std::to_string(rc.lhs) + ", rhs " + std::to_string(rc.rhs);
    report::finalize_single(rep, rc.residual, tol, CheckKind::ResidualSingle);
    out.records.push_back(std::move(rep));
  };

  // pinned scaling-flow scenario on the unit hemisphere
  {
    const ambient::SpaceForm eu = ambient::SpaceForm::euclidean_half_space(3);
    const DiscreteImmersion hemi = discretize(cap_family(eu, 2, 1.0, kPi / 2), 48);
    push_rate("first-variation-scaling", "euclid", 2, 1,
              kPi / 2, variation::first_variation_check(hemi, variation::scaling_field(), 1, dt),
              1e-6);
    push_rate("wetting-rate-unit-normal", "euclid", 2, 1, kPi / 2,
              variation::wetting_rate_check(hemi, variation::unit_normal_field(), 1, dt), 1e-6);
    push_rate("volume-rate", "euclid", 2, -1, kPi / 2,
              variation::volume_rate_check(hemi, variation::scaling_field(), dt), 1e-8);
  }

  // scaling flow across r on Euclidean caps
  for (int n : config.n_list) {
    const ambient::SpaceForm eu = space_of("euclid", n);
    const DiscreteImmersion m =
        discretize(cap_family(eu, n, config.lambda, kPi / 3), n == 2 ? 48 : 24);
    for (int r : r_values(config, n))
      push_rate("first-variation-scaling", "euclid", n, r, kPi / 3,
                variation::first_variation_check(m, variation::scaling_field(), r, dt), 1e-6);
  }

  // scaling flow on a non-umbilical constant-angle cap: the closed form
  // carries a genuinely varying curvature integrand
  {
    const ambient::SpaceForm eu = space_of("euclid", 2);
    const immersion::ParametricPatch pert = perturbed_cap(
        cap_family(eu, 2, config.lambda, kPi / 3), config.perturb_amplitude / config.lambda,
        config.perturb_mode);
    const DiscreteImmersion m = discretize(pert, 48);
    for (int r : r_values(config, 2))
      push_rate("first-variation-perturbed", "euclid", 2, r, kPi / 3,
                variation::first_variation_check(m, variation::scaling_field(), r, dt), 1e-8);
  }

  // admissible-field flows on both models
  for (const std::string& model : config.models) {
    for (int n : config.n_list) {
      const ambient::SpaceForm space = space_of(model, n);
      const DiscreteImmersion m =
          discretize(cap_family(space, n, config.lambda, kPi / 3), n == 2 ? 48 : 24);
      Rng rng(0x51f15eedu + (model == "horoball" ? 1 : 0) + 2 * n);
      const stability::AdmissibleField phi = stability::random_admissible_field(m, rng, 5);
      for (int r : r_values(config, n)) {
        push_rate("first-variation-admissible", model, n, r, kPi / 3,
                  variation::first_variation_check(m, variation::from_admissible(phi), r, dt),
                  1e-5);
        if (n == 2)
          push_rate("wetting-rate-admissible", model, n, r, kPi / 3,
                    variation::wetting_rate_check(m, variation::from_admissible(phi), r, dt),
                    1e-5);
      }
    }
  }

  // dual-ledger consistency on the closed sphere
  {
    const DiscreteImmersion sphere = discretize(closed_sphere(2, 1.0), 32);
    auto worst_dev = [](const variation::StepDiagnostics& d) {
      return std::max({d.dev_g, d.dev_nu, d.dev_h, d.dev_sigma, d.dev_density});
    };
    const double dt0 = 0.02;
    const variation::FlowResult f1 =
        variation::evolve(sphere, variation::unit_normal_field(), dt0, 10);
    const variation::FlowResult f2 =
        variation::evolve(sphere, variation::unit_normal_field(), dt0 / 2, 10);
    const double dev1 = worst_dev(f1.diagnostics.back());
    const double dev2 = worst_dev(f2.diagnostics.back());
    const double envelope = std::max(dev1 / (dt0 * dt0), dev2 / (0.25 * dt0 * dt0));

    VerificationReport rep = base_report("dual-ledger-deviation", "euclid", 2, -1, 0.0, 1.0);
    rep.notes = "10 steps at dt 0.02 and 0.01; quadratic envelope constant " +
                std::to_string(envelope);
    report::finalize_single(rep, std::max(dev1, dev2), 1e-5, CheckKind::ResidualSingle);
    out.records.push_back(std::move(rep));

    VerificationReport env = base_report("dual-ledger-envelope", "euclid", 2, -1, 0.0, 1.0);
    report::finalize_single(env, envelope, 1.0, CheckKind::ResidualSingle);
    out.records.push_back(std::move(env));
  }
  return out;
}

ReportFile run_all(const RunConfig& config) {
  ReportFile out;
  auto absorb = [&](ReportFile part) {
    for (VerificationReport& rep : part.records) out.records.push_back(std::move(rep));
  };
  absorb(run_ambient(config));
  absorb(run_minkowski(config));
  absorb(run_boundary(config));
  absorb(run_jacobi(config));
  absorb(run_stability(config));
  absorb(run_gaps(config));
  absorb(run_first_variation(config));
  return out;
}

}  // namespace runner
}  // namespace capverify
