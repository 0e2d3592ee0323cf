// capverify: numerical verification of curvature and capillary-boundary
// identities on spherical caps in the Euclidean half-space and in the
// upper-half-space model of hyperbolic space.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "capverify/runner.hpp"

namespace {

using capverify::runner::RunConfig;
using ReportFn = capverify::report::ReportFile (*)(const RunConfig&);

int threads_from_env() {
  const char* env = std::getenv("CAPVERIFY_THREADS");
  if (env == nullptr) return 1;
  const int v = std::atoi(env);
  return v >= 1 ? v : 1;
}

void apply_config_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw capverify::ArgumentError("cannot open config file " + path);
  nlohmann::json j;
  in >> j;
  if (j.contains("models")) config.models = j["models"].get<std::vector<std::string>>();
  if (j.contains("n")) config.n_list = j["n"].get<std::vector<int>>();
  if (j.contains("r")) config.r_list = j["r"].get<std::vector<int>>();
  if (j.contains("theta")) config.theta_list = j["theta"].get<std::vector<double>>();
  if (j.contains("lambda")) config.lambda = j["lambda"].get<double>();
  if (j.contains("resolutions")) config.resolutions = j["resolutions"].get<std::vector<int>>();
  if (j.contains("basis_size")) config.basis_size = j["basis_size"].get<int>();
  if (j.contains("random_fields")) config.random_fields = j["random_fields"].get<int>();
  if (j.contains("flow_dt")) config.flow_dt = j["flow_dt"].get<double>();
  if (j.contains("tol_integral")) config.tol_integral = j["tol_integral"].get<double>();
  if (j.contains("tol_pointwise")) config.tol_pointwise = j["tol_pointwise"].get<double>();
  if (j.contains("scenario")) config.scenario = j["scenario"].get<std::string>();
}

int emit(const capverify::report::ReportFile& report, const std::string& out_path) {
  const std::string text = report.serialize();
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "capverify: cannot write " << out_path << "\n";
      return 2;
    }
    out << text;
  }
  if (!report.all_pass()) {
    const capverify::report::VerificationReport* failed = report.first_failure();
    std::cerr << "capverify: FAILED record: " << failed->identity << " (model " << failed->model
              << ", n " << failed->n << ", r " << failed->r << ", theta " << failed->theta
              << ")\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"capverify: curvature / capillary-boundary identity verification"};
  app.require_subcommand(1);

  RunConfig config;
  config.threads = threads_from_env();
  std::string out_path;
  std::string config_path;
  std::vector<std::string> model_flag;
  std::vector<int> n_flag, r_flag, res_flag;
  std::vector<double> theta_flag;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--model", model_flag, "models to run: euclid, horoball")->delimiter(',');
    cmd->add_option("--n", n_flag, "surface dimensions (2, 3)")->delimiter(',');
    cmd->add_option("--r", r_flag, "curvature orders (default: all 0..n-1)")->delimiter(',');
    cmd->add_option("--theta", theta_flag, "contact angles in radians")->delimiter(',');
    cmd->add_option("--lambda", config.lambda, "umbilic curvature of the cap family");
    cmd->add_option("--res", res_flag, "resolution sweep, strictly increasing")->delimiter(',');
    cmd->add_option("--tol-integral", config.tol_integral,
                    "tolerance override for integral identities");
    cmd->add_option("--tol-pointwise", config.tol_pointwise,
                    "tolerance override for sup-norm identities");
    cmd->add_option("--scenario", config.scenario,
                    "verify one scenario string instead of the cap matrix");
    cmd->add_option("--out", out_path, "report file path ('-' for stdout)");
    cmd->add_option("--config", config_path, "JSON config file (same schema as the flags)");
  };

  struct Sub {
    const char* name;
    const char* help;
    ReportFn fn;
  };
  const Sub subs[] = {
      {"verify-minkowski", "integral Minkowski-type identities",
       &capverify::runner::run_minkowski},
      {"verify-boundary", "boundary flux identities on the horoball",
       &capverify::runner::run_boundary},
      {"verify-jacobi", "pointwise Jacobi and Robin identities", &capverify::runner::run_jacobi},
      {"verify-ambient", "ambient Killing / Hessian identities", &capverify::runner::run_ambient},
      {"stability", "test functions, cap reduction, lowest eigenvalue",
       &capverify::runner::run_stability},
      {"rigidity-gaps", "curvature, Hoelder and quadratic gap positivity",
       &capverify::runner::run_gaps},
      {"first-variation", "flow-based first-variation and wetting-rate checks",
       &capverify::runner::run_first_variation},
      {"convergence", "identity residual sweeps with order estimates",
       &capverify::runner::run_convergence},
      {"all", "the full verification matrix", &capverify::runner::run_all},
  };
  for (const Sub& sub : subs) add_common(app.add_subcommand(sub.name, sub.help));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    CLI::App* active = app.get_subcommands().front();
    if (!config_path.empty()) {
      // explicit flags win over the config file
      const RunConfig parsed = config;
      apply_config_file(config, config_path);
      if (active->count("--lambda") > 0) config.lambda = parsed.lambda;
      if (active->count("--tol-integral") > 0) config.tol_integral = parsed.tol_integral;
      if (active->count("--tol-pointwise") > 0) config.tol_pointwise = parsed.tol_pointwise;
      if (active->count("--scenario") > 0) config.scenario = parsed.scenario;
    }
    if (!model_flag.empty()) config.models = model_flag;
    if (!n_flag.empty()) config.n_list = n_flag;
    if (!r_flag.empty()) config.r_list = r_flag;
    if (!theta_flag.empty()) config.theta_list = theta_flag;
    if (!res_flag.empty()) {
      config.resolutions = res_flag;
      // an explicit sweep also drives the single-surface stability runs
      config.stability_resolution_2d = std::min(res_flag.back(), 64);
      config.stability_resolution_3d = std::min(res_flag.back(), 32);
    }
    config.validate();

    for (const Sub& sub : subs)
      if (app.got_subcommand(sub.name)) return emit(sub.fn(config), out_path);
    std::cerr << "capverify: no subcommand selected\n";
    return 2;
  } catch (const capverify::ArgumentError& e) {
    std::cerr << "capverify: usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "capverify: error: " << e.what() << "\n";
    return 1;
  }
}
