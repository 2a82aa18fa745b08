#include "fbp/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace fbp {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct Entry {
  std::string value;
  std::size_t line;
};

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& key, const Entry& e) {
  double v = 0.0;
  const char* b = e.value.data();
  const char* end = b + e.value.size();
  auto [p, ec] = std::from_chars(b, end, v);
  if (ec != std::errc() || p != end) fail(e.line, key + ": expected a number, got '" + e.value + "'");
  return v;
}

std::size_t to_count(const std::string& key, const Entry& e) {
  unsigned long long v = 0;
  const char* b = e.value.data();
  const char* end = b + e.value.size();
  auto [p, ec] = std::from_chars(b, end, v);
  if (ec != std::errc() || p != end) fail(e.line, key + ": expected a non-negative integer, got '" + e.value + "'");
  return static_cast<std::size_t>(v);
}

bool to_bool(const std::string& key, const Entry& e) {
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  fail(e.line, key + ": expected true or false, got '" + e.value + "'");
}

std::vector<double> numbers(const std::string& key, const Entry& e) {
  std::istringstream is(e.value);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) out.push_back(to_double(key, {tok, e.line}));
  if (out.empty()) fail(e.line, key + ": expected at least one number");
  return out;
}

// "x:y" or "x:y:dy" pairs separated by blanks
FunctionSpec table(const std::string& key, const Entry& e) {
  std::istringstream is(e.value);
  std::vector<double> x, y, dy;
  std::string tok;
  while (is >> tok) {
    std::vector<double> parts;
    std::size_t start = 0;
    while (true) {
      const auto c = tok.find(':', start);
      parts.push_back(to_double(key, {tok.substr(start, c - start), e.line}));
      if (c == std::string::npos) break;
      start = c + 1;
    }
    if (parts.size() < 2 || parts.size() > 3) fail(e.line, key + ": table entries are x:y or x:y:dy");
    x.push_back(parts[0]);
    y.push_back(parts[1]);
    if (parts.size() == 3) dy.push_back(parts[2]);
  }
  if (!dy.empty() && dy.size() != x.size()) fail(e.line, key + ": give dy for every entry or for none");
  try {
    return FunctionSpec::table(x, y, dy);
  } catch (const InvalidData& ex) {
    fail(e.line, key + ": " + ex.what());
  }
}

const std::set<std::string> known = {
    "D", "beta", "b", "C1", "u0.poly", "u0.table", "f.poly", "f.table", "n_time", "n_space", "sigma",
    "sigma_fraction", "norm_horizon", "picard_tol", "outer_tol", "max_iter", "max_outer", "relaxation",
    "chi_form", "profile_cells", "out", "emit_field", "mms.sigma"};

} // namespace

RunConfig parse_config(const std::string& text) {
  std::map<std::string, Entry> kv;
  RunConfig cfg;
  std::istringstream is(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value");
    const std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
    if (!known.count(key)) fail(line, "unknown key: " + key);
    if (value.empty()) fail(line, key + ": missing value");
    if (kv.count(key)) fail(line, "duplicate key: " + key);
    kv[key] = {value, line};
    cfg.echo.emplace_back(key, value);
  }
  const std::size_t last = line;
  auto need = [&](const std::string& key) -> const Entry& {
    auto it = kv.find(key);
    if (it == kv.end()) fail(last, "missing required key: " + key);
    return it->second;
  };
  auto has = [&](const std::string& key) { return kv.count(key) > 0; };

  auto& p = cfg.problem;
  p.D = to_double("D", need("D"));
  p.beta = to_double("beta", need("beta"));
  p.b = to_double("b", need("b"));
  p.C1 = to_double("C1", need("C1"));
  auto function = [&](const std::string& name) {
    const bool poly = has(name + ".poly"), tab = has(name + ".table");
    if (poly == tab) fail(poly ? kv[name + ".table"].line : last, "give exactly one of " + name + ".poly and " + name + ".table");
    return poly ? FunctionSpec::polynomial(numbers(name + ".poly", kv[name + ".poly"])) : table(name + ".table", kv[name + ".table"]);
  };
  p.u0 = function("u0");
  p.f = function("f");

  cfg.n_time = to_count("n_time", need("n_time"));
  cfg.n_space = to_count("n_space", need("n_space"));
  if (cfg.n_time < 16) fail(kv["n_time"].line, "n_time must be at least 16");
  if (cfg.n_space < 16) fail(kv["n_space"].line, "n_space must be at least 16");

  const auto& se = need("sigma");
  if (se.value == "certified") {
    cfg.sigma_certified = true;
  } else {
    cfg.sigma = to_double("sigma", se);
    if (!(cfg.sigma > 0.0)) fail(se.line, "sigma must be positive");
  }
  if (has("sigma_fraction")) {
    cfg.sigma_fraction = to_double("sigma_fraction", kv["sigma_fraction"]);
    if (!(cfg.sigma_fraction > 0.0 && cfg.sigma_fraction <= 1.0)) fail(kv["sigma_fraction"].line, "sigma_fraction must lie in (0, 1]");
  }
  cfg.norm_horizon = cfg.sigma_certified ? 1.0 : cfg.sigma;
  if (has("norm_horizon")) {
    cfg.norm_horizon = to_double("norm_horizon", kv["norm_horizon"]);
    if (!(cfg.norm_horizon > 0.0)) fail(kv["norm_horizon"].line, "norm_horizon must be positive");
  }
  if (!cfg.sigma_certified && cfg.norm_horizon < cfg.sigma) fail(kv["norm_horizon"].line, "norm_horizon must cover sigma");
  p.sigma_request = cfg.norm_horizon;

  auto positive = [&](const std::string& key, double& dst) {
    if (!has(key)) return;
    dst = to_double(key, kv[key]);
    if (!(dst > 0.0)) fail(kv[key].line, key + " must be positive");
  };
  positive("picard_tol", cfg.solver.picard_tol);
  positive("outer_tol", cfg.solver.outer_tol);
  auto count = [&](const std::string& key, std::size_t& dst) {
    if (!has(key)) return;
    dst = to_count(key, kv[key]);
    if (dst < 1) fail(kv[key].line, key + " must be at least 1");
  };
  count("max_iter", cfg.solver.max_iter);
  count("max_outer", cfg.solver.max_outer);
  count("profile_cells", cfg.profile_cells);
  if (cfg.profile_cells < 16) fail(kv["profile_cells"].line, "profile_cells must be at least 16");
  if (has("relaxation")) {
    cfg.solver.relaxation = to_double("relaxation", kv["relaxation"]);
    if (!(cfg.solver.relaxation > 0.0 && cfg.solver.relaxation <= 1.0)) fail(kv["relaxation"].line, "relaxation must lie in (0, 1]");
  }
  if (has("chi_form")) {
    const auto& v = kv["chi_form"].value;
    if (v == "corrected") cfg.chi_form = ChiForm::corrected;
    else if (v == "direct") cfg.chi_form = ChiForm::direct;
    else fail(kv["chi_form"].line, "chi_form must be corrected or direct");
  }
  if (has("out")) cfg.out_dir = kv["out"].value;
  if (has("emit_field")) cfg.emit_field = to_bool("emit_field", kv["emit_field"]);
  positive("mms.sigma", cfg.mms_sigma);
  cfg.solver.field_nodes = cfg.n_space;
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream fh(path);
  if (!fh) throw ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << fh.rdbuf();
  return parse_config(ss.str());
}

} // namespace fbp
