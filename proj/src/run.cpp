#include "fbp/run.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "fbp/certificate.hpp"
#include "fbp/errors.hpp"
#include "fbp/reconstruction.hpp"
#include "fbp/verification.hpp"

namespace fbp {

namespace fs = std::filesystem;
using nlohmann::json;

Command parse_command(const std::string& s) {
  if (s == "certify") return Command::certify;
  if (s == "solve") return Command::solve;
  if (s == "verify") return Command::verify;
  if (s == "mms") return Command::mms;
  throw ConfigError("unknown command: " + s);
}

namespace {

const char* name(Command c) {
  switch (c) {
  case Command::certify: return "certify";
  case Command::solve: return "solve";
  case Command::verify: return "verify";
  case Command::mms: return "mms";
  }
  return "?";
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class Csv {
public:
  Csv(const fs::path& p, const std::string& header) : f_(std::fopen(p.c_str(), "w")) {
    if (!f_) throw std::runtime_error("cannot write " + p.string());
    std::fprintf(f_, "%s\n", header.c_str());
  }
  ~Csv() { std::fclose(f_); }
  Csv(const Csv&) = delete;
  Csv& operator=(const Csv&) = delete;
  void row(std::initializer_list<double> v, const char* label = nullptr) {
    bool first = true;
    if (label) {
      std::fprintf(f_, "%s", label);
      first = false;
    }
    for (double x : v) {
      std::fprintf(f_, first ? "%.16e" : ",%.16e", x);
      first = false;
    }
    std::fputc('\n', f_);
  }

private:
  std::FILE* f_;
};

void write_json(const fs::path& p, const json& j) {
  std::ofstream o(p);
  o << j.dump(2) << '\n';
}

json base_manifest(Command cmd, const RunConfig& cfg) {
  json m;
  m["software"] = software_version;
  m["command"] = name(cmd);
  m["timestamp"] = timestamp();
  json echo = json::object();
  for (const auto& [k, v] : cfg.echo) echo[k] = v;
  m["config"] = echo;
  return m;
}

json hypotheses_json(const HypothesisReport& r) {
  json j = to_json(r);
  json failed = json::array();
  for (const auto& c : r.checks)
    if (!c.passed) failed.push_back({{"name", c.name}, {"margin", c.margin}, {"detail", c.detail}});
  return {{"checks", j}, {"failed", failed}, {"all_passed", r.all_passed()}};
}

json pi_json(const PiReport& r) {
  json v = json::array();
  for (const auto& x : r.violations) v.push_back({{"kind", x.kind}, {"index", x.index}, {"value", x.value}, {"bound", x.bound}});
  return {{"member", r.member}, {"violations", v}};
}

json solution_json(const SolutionBundle& b) {
  json j;
  j["converged"] = b.converged;
  j["failure"] = b.failure;
  j["outer_iterations"] = b.outer_iterations;
  j["outer_history"] = b.outer_history;
  j["inner_iterations"] = b.inner_iterations;
  j["inner_histories"] = b.inner_histories;
  j["max_inner_ratio"] = b.max_inner_ratio;
  j["final_inner_residual"] = b.final_inner_residual;
  json pis = json::array();
  for (const auto& r : b.pi_reports) pis.push_back(pi_json(r));
  j["pi_reports"] = pis;
  return j;
}

void write_boundaries(const fs::path& dir, const SolutionBundle& b, const VolterraContext& ctx) {
  Csv c(dir / "boundaries.csv", "t,y0,y1,phi1,phi2,h");
  for (std::size_t k = 0; k < ctx.grid.levels(); ++k)
    c.row({ctx.grid.time(k), b.curves.y0[k], b.curves.y1[k], b.phi.phi1[k], b.phi.phi2[k], b.h.h[k]});
}

void write_solution(const fs::path& dir, const SolutionBundle& b, const ParametricSolution& p,
                    const VolterraContext& ctx, bool field) {
  write_boundaries(dir, b, ctx);
  {
    Csv c(dir / "front.csv", "t,s");
    for (std::size_t k = 0; k < p.levels(); ++k) c.row({p.t[k], p.s[k]});
  }
  {
    Csv c(dir / "parametric.csv", "t,x,u");
    for (std::size_t k = 0; k < p.levels(); ++k)
      for (std::size_t i = 0; i < p.x[k].size(); ++i) c.row({p.t[k], p.x[k][i], p.u[k][i]});
  }
  if (field) {
    Csv c(dir / "field.csv", "t,y,w");
    for (std::size_t k = 0; k < b.field.y.size(); ++k)
      for (std::size_t i = 0; i < b.field.y[k].size(); ++i) c.row({ctx.grid.time(k), b.field.y[k][i].value(), b.field.w[k][i]});
  }
}

int certify(const RunConfig& cfg, const fs::path& dir, std::ostream& log) {
  auto m = base_manifest(Command::certify, cfg);
  const auto der = derive_constants(cfg.problem);
  const auto cert = compute_certificate(cfg.problem, der.derived);
  m["hypotheses"] = hypotheses_json(cert.hypotheses);
  m["certificate"] = to_json(cert);
  m["sigma_max"] = cert.sigma_max;
  write_json(dir / "manifest.json", m);
  const bool ok = cert.valid && cert.hypotheses.all_passed();
  for (const auto& c : cert.hypotheses.checks)
    if (!c.passed) log << "hypothesis " << c.name << " fails: " << c.detail << " (margin " << c.margin << ")\n";
  if (!ok) return exit_hypothesis;
  log << "certified horizon sigma_max = " << cert.sigma_max << '\n';
  return exit_ok;
}

int solve(Command cmd, const RunConfig& cfg, const fs::path& dir, std::ostream& log) {
  auto m = base_manifest(cmd, cfg);
  const auto der = derive_constants(cfg.problem);
  const auto cert = compute_certificate(cfg.problem, der.derived);
  m["hypotheses"] = hypotheses_json(cert.hypotheses);
  m["certificate"] = to_json(cert);
  double sigma = cfg.sigma;
  if (cfg.sigma_certified) {
    if (!cert.valid) {
      m["error"] = "sigma = certified but the certificate is not valid";
      write_json(dir / "manifest.json", m);
      log << "cannot certify a horizon\n";
      return exit_hypothesis;
    }
    sigma = cert.sigma_max * cfg.sigma_fraction;
  }
  m["sigma"] = sigma;
  auto opts = cfg.solver;
  opts.field_nodes = cfg.n_space;
  if (cert.valid) opts.pi = PiSpec{cert.H, cert.R, cert.S, sigma};
  for (const auto& c : cert.hypotheses.checks)
    if (!c.passed) log << "warning: hypothesis " << c.name << " fails (margin " << c.margin << ")\n";
  if (cert.valid && sigma > cert.sigma_max) log << "warning: sigma exceeds the certified horizon " << cert.sigma_max << '\n';

  try {
    const auto ctx = make_context(cfg.problem, der.derived, build_initial_profiles(cfg.problem, der.derived, cfg.profile_cells),
                                  SolverGrid{sigma, cfg.n_time}, cfg.chi_form);
    const auto b = solve_outer(ctx, opts);
    m["solution"] = solution_json(b);
    if (!b.converged) {
      write_json(dir / "manifest.json", m);
      log << b.failure << '\n';
      return exit_solver;
    }
    const auto p = reconstruct_solution(b, ctx);
    m["reconstruction"] = {{"s0", p.s0}, {"monotone", p.monotone}, {"min_u_minus_beta", p.min_u_minus_beta},
                           {"mass_scale_max_dev", p.mass_scale_max_dev}, {"monitors", p.monitors}};
    write_solution(dir, b, p, ctx, cfg.emit_field);
    if (cmd == Command::verify) m["residuals"] = to_json(residual_suite(b, p, ctx));
    write_json(dir / "manifest.json", m);
    log << "converged in " << b.outer_iterations << " outer iterations\n";
    return exit_ok;
  } catch (const HorizonExceeded& e) {
    m["error"] = e.what();
    m["horizon_index"] = e.index;
    write_json(dir / "manifest.json", m);
    log << e.what() << '\n';
    return exit_solver;
  } catch (const NumericalFailure& e) {
    m["error"] = e.what();
    write_json(dir / "manifest.json", m);
    log << e.what() << '\n';
    return exit_solver;
  }
}

int mms(const RunConfig& cfg, const fs::path& dir, std::ostream& log) {
  auto m = base_manifest(Command::mms, cfg);
  const auto y0 = straight_curve(0.5, -0.1), y1 = straight_curve(1.0, 0.2);
  Csv c(dir / "mms.csv", "case,n,error");
  json rows = json::array();
  const std::pair<const char*, Manufactured> cases[] = {{"linear", mms_linear(0.0, 1.0)},
                                                        {"quadratic", mms_quadratic(cfg.problem.D)}};
  for (const auto& [label, mf] : cases) {
    double prev = 0.0;
    for (std::size_t n : {cfg.n_time / 2, cfg.n_time}) {
      MmsSettings s;
      s.D = cfg.problem.D;
      s.sigma = cfg.mms_sigma;
      s.n = n;
      const double e = mms_representation_check(mf, y0, y1, s).error;
      c.row({static_cast<double>(n), e}, label);
      json r = {{"case", label}, {"n", n}, {"error", e}};
      if (prev > 0.0 && e > 0.0) r["ratio"] = prev / e;
      rows.push_back(r);
      log << label << " n=" << n << " error=" << e << '\n';
      prev = e;
    }
  }
  m["mms"] = rows;
  write_json(dir / "manifest.json", m);
  return exit_ok;
}

} // namespace

int run_command(Command cmd, const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
  fs::create_directories(out_dir);
  switch (cmd) {
  case Command::certify: return certify(cfg, out_dir, log);
  case Command::solve:
  case Command::verify: return solve(cmd, cfg, out_dir, log);
  case Command::mms: return mms(cfg, out_dir, log);
  }
  return exit_usage;
}

} // namespace fbp
