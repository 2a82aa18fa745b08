#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "fbp/config.hpp"
#include "fbp/run.hpp"

using namespace fbp;
namespace fs = std::filesystem;

namespace {

const std::string minimal = R"(# problem
D = 1
beta = 0.5
b = 0.5
C1 = 0.3
u0.poly = 1 -1
f.poly = 1 0.2   # boundary value
# grid
n_time = 16
n_space = 16
sigma = 0.02
)";

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("fbsolve_test_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write_config(const std::string& name, const std::string& text) {
  const auto p = scratch() / (name + ".config");
  std::ofstream(p) << text;
  return p;
}

int fbsolve(const std::string& args) {
  const std::string cmd = std::string(FBSOLVE_PATH) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

nlohmann::json manifest(const fs::path& dir) { return nlohmann::json::parse(slurp(dir / "manifest.json")); }

} // namespace

TEST_CASE("minimal config takes solver defaults") {
  const auto c = parse_config(minimal);
  CHECK(c.problem.D == 1.0);
  CHECK(c.problem.u0(0.25) == 0.75);
  CHECK(c.problem.f(1.0) == doctest::Approx(1.2));
  CHECK(c.n_time == 16);
  CHECK_FALSE(c.sigma_certified);
  CHECK(c.sigma == 0.02);
  CHECK(c.problem.sigma_request == 0.02);
  CHECK(c.solver.picard_tol == 1e-10);
  CHECK(c.solver.outer_tol == 1e-8);
  CHECK(c.solver.max_iter == 200);
  CHECK(c.solver.max_outer == 100);
  CHECK(c.solver.relaxation == 1.0);
  CHECK(c.chi_form == ChiForm::corrected);
  CHECK_FALSE(c.emit_field);
  CHECK(c.echo.size() == 9);
}

TEST_CASE("config errors name the key and line") {
  auto e = error_of(minimal + "gamma = 2\n");
  CHECK(e.find("unknown key: gamma") != std::string::npos);
  CHECK(e.find("line 12") != std::string::npos);
  e = error_of(minimal + "picard_tol = -1\n");
  CHECK(e.find("picard_tol must be positive") != std::string::npos);
  e = error_of(minimal + "relaxation = 1.5\n");
  CHECK(e.find("relaxation") != std::string::npos);
  e = error_of(minimal + "max_iter = 2.5\n");
  CHECK(e.find("max_iter") != std::string::npos);
  e = error_of(minimal + "u0.table = 0:1 0.5:0.5\n");
  CHECK(e.find("exactly one of u0.poly and u0.table") != std::string::npos);
  e = error_of(minimal + "D = 2\n");
  CHECK(e.find("duplicate key: D") != std::string::npos);
  CHECK(error_of("D = x\n").find("D: expected a number") != std::string::npos);
  CHECK(error_of("D = 1\n").find("missing required key: beta") != std::string::npos);
  std::string small = minimal;
  small.replace(small.find("n_time = 16"), 11, "n_time = 8");
  CHECK(error_of(small).find("n_time must be at least 16") != std::string::npos);
}

TEST_CASE("tables, certified horizons and options") {
  std::string t = minimal;
  t.replace(t.find("u0.poly = 1 -1"), 14, "u0.table = 0:1:-1 0.5:0.5:-1");
  t.replace(t.find("sigma = 0.02"), 12, "sigma = certified\nsigma_fraction = 0.5\nchi_form = direct\nemit_field = true");
  const auto c = parse_config(t);
  CHECK(c.problem.u0(0.25) == doctest::Approx(0.75));
  CHECK(c.sigma_certified);
  CHECK(c.sigma_fraction == 0.5);
  CHECK(c.norm_horizon == 1.0);
  CHECK(c.chi_form == ChiForm::direct);
  CHECK(c.emit_field);
  CHECK_THROWS_AS(parse_command("plot"), ConfigError);
  CHECK(parse_command("mms") == Command::mms);
}

TEST_CASE("certify exit codes and manifest") {
  const auto bad = write_config("ipp", R"(D = 1
beta = 0.1
b = 1
C1 = 0.2
u0.table = 0:2 0.5:1 1:0.1
f.poly = 2
n_time = 16
n_space = 16
sigma = 0.01
)");
  const auto out = scratch() / "ipp_out";
  CHECK(fbsolve("certify --config " + bad.string() + " --out " + out.string()) == exit_hypothesis);
  const auto m = manifest(out);
  bool listed = false;
  for (const auto& f : m["hypotheses"]["failed"])
    if (f["name"] == "ipp") listed = f["margin"].get<double>() < 0.0;
  CHECK(listed);
  CHECK(m["certificate"]["valid"] == false);
  CHECK(m["software"] == software_version);

  const auto good = write_config("cert", R"(D = 0.9
beta = 0.12
b = 0.08
C1 = 0.05
u0.poly = 0.19 -0.875
f.poly = 0.19
n_time = 16
n_space = 16
sigma = certified
)");
  const auto gout = scratch() / "cert_out";
  CHECK(fbsolve("certify --config " + good.string() + " --out " + gout.string()) == exit_ok);
  const auto gm = manifest(gout);
  CHECK(gm["sigma_max"].get<double>() > 0.0);
  CHECK(gm["certificate"]["constants"].contains("H2_coefficient"));
}

TEST_CASE("solve on quiescent data") {
  const auto cfg = write_config("quiet", R"(D = 1
beta = 0.5
b = 0.4
C1 = 0.2
u0.poly = 0.5
f.poly = 0.5
n_time = 16
n_space = 16
sigma = 0.1
)");
  const auto out = scratch() / "quiet_out";
  CHECK(fbsolve("solve --config " + cfg.string() + " --out " + out.string()) == exit_ok);
  const auto m = manifest(out);
  CHECK(m["solution"]["outer_iterations"] == 1);
  CHECK(m["solution"]["converged"] == true);
  for (const char* f : {"boundaries.csv", "front.csv", "parametric.csv"}) CHECK(fs::exists(out / f));
  CHECK_FALSE(fs::exists(out / "field.csv"));
  std::ifstream b(out / "boundaries.csv");
  std::string header, row;
  std::getline(b, header);
  std::getline(b, row);
  CHECK(header == "t,y0,y1,phi1,phi2,h");
  CHECK(row.find("0.0000000000000000e+00") == 0);
}

TEST_CASE("verify is reproducible and failures map to exit codes") {
  const auto cfg = write_config("mod", minimal);
  const auto a = scratch() / "mod_a", b = scratch() / "mod_b";
  CHECK(fbsolve("verify --config " + cfg.string() + " --out " + a.string() + " --emit-field") == exit_ok);
  CHECK(fbsolve("verify --config " + cfg.string() + " --out " + b.string() + " --emit-field") == exit_ok);
  for (const char* f : {"boundaries.csv", "front.csv", "parametric.csv", "field.csv"}) CHECK(slurp(a / f) == slurp(b / f));
  auto ma = manifest(a), mb = manifest(b);
  CHECK(ma.contains("residuals"));
  CHECK(ma["residuals"]["residuals"].contains("stefan"));
  ma.erase("timestamp");
  mb.erase("timestamp");
  CHECK(ma.dump() == mb.dump());

  const auto stuck = write_config("stuck", minimal + "max_iter = 2\n");
  const auto s = scratch() / "stuck_out";
  CHECK(fbsolve("solve --config " + stuck.string() + " --out " + s.string()) == exit_solver);
  CHECK(manifest(s)["solution"]["failure"] == "inner iteration did not converge");

  CHECK(fbsolve("plot --config " + cfg.string()) == exit_usage);
  CHECK(fbsolve("solve --config " + (scratch() / "missing.config").string()) == exit_usage);
  CHECK(fbsolve("solve") == exit_usage);
  const auto broken = write_config("broken", minimal + "gamma = 1\n");
  CHECK(fbsolve("certify --config " + broken.string()) == exit_usage);
}

TEST_CASE("mms command writes the error table") {
  const auto cfg = write_config("mms", minimal);
  const auto out = scratch() / "mms_out";
  CHECK(fbsolve("mms --config " + cfg.string() + " --out " + out.string()) == exit_ok);
  const auto m = manifest(out);
  REQUIRE(m["mms"].size() == 4);
  for (const auto& r : m["mms"]) CHECK(r["error"].get<double>() < 1e-2);
  std::ifstream f(out / "mms.csv");
  std::string header;
  std::getline(f, header);
  CHECK(header == "case,n,error");
}
