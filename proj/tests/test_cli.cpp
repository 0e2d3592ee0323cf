// End-to-end checks of the command-line driver (exit codes and report files).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(CAPVERIFY_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("schema violations exit with the usage code") {
  CHECK(run("verify-minkowski --res 32 --res 16 --out /tmp/capverify_cli_bad.json") == 2);
  CHECK(run("verify-minkowski --model torus --out /tmp/capverify_cli_bad.json") == 2);
  CHECK(run("verify-minkowski --theta 0 --out /tmp/capverify_cli_bad.json") == 2);
  CHECK(run("no-such-subcommand") == 2);
}

TEST_CASE("small verification run exits zero and writes a well-formed report") {
  const std::string out = "/tmp/capverify_cli_small.json";
  CHECK(run("verify-minkowski --model euclid --n 2 --r 0 --r 1 --theta 1.0472 "
            "--res 16 --res 32 --res 64 --out " + out) == 0);
  nlohmann::json j = nlohmann::json::parse(slurp(out));
  CHECK(j["schema_version"] == 1);
  CHECK(j["records"].size() > 0);
  for (const auto& rec : j["records"]) CHECK(rec["verdict"] == "pass");
}

TEST_CASE("identical configs produce byte-identical reports") {
  const std::string a = "/tmp/capverify_cli_a.json";
  const std::string b = "/tmp/capverify_cli_b.json";
  const std::string flags =
      "verify-boundary --n 2 --theta 1.0472 --res 16 --res 32 --out ";
  CHECK(run(flags + a) == 0);
  CHECK(run(flags + b) == 0);
  const std::string ta = slurp(a), tb = slurp(b);
  CHECK(ta == tb);
  CHECK(!ta.empty());
}

TEST_CASE("config file drives the run") {
  const std::string cfg = "/tmp/capverify_cli_cfg.json";
  {
    std::ofstream out(cfg);
    out << R"({"models":["euclid"],"n":[2],"theta":[1.5707963267948966],)"
        << R"("resolutions":[16,32]})";
  }
  CHECK(run("verify-minkowski --config " + cfg + " --out /tmp/capverify_cli_cfg_out.json") == 0);
}
