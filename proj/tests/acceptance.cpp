// One PASS/FAIL line per acceptance criterion. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <unistd.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <nlohmann/json.hpp>

#include "fbp/certificate.hpp"
#include "fbp/kernels.hpp"
#include "fbp/outer.hpp"
#include "fbp/quadrature.hpp"
#include "fbp/reconstruction.hpp"
#include "fbp/transform_chain.hpp"
#include "fbp/verification.hpp"
#include "fixtures.hpp"
#include "heat_chain.hpp"

using namespace fbp;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3g", v);
  return b;
}

int failures = 0;

void criterion(int id, const char* title, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail += std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s %d %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", id, title, secs, o.detail.c_str());
  std::fflush(stdout);
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome kernels() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  double norm_err = 0.0;
  for (double t : {1e-4, 0.01, 0.5, 3.0})
    for (double x : {-1.0, 0.0, 2.5}) {
      const double D = 0.8, w = 40.0 * std::sqrt(D * t);
      const double m = GK::integrate([&](double xi) { return heat_kernel({x, t, xi, 0, D}); }, x - w, x + w, 15, 1e-14);
      norm_err = std::max(norm_err, std::abs(m - 1.0));
    }
  o.require(norm_err <= 1e-10, "normalisation " + fmt(norm_err));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-3, 3), T(0.001, 2);
  bool exact = true;
  for (int i = 0; i < 1000; ++i) {
    const double x = U(rng), xi = U(rng), tau = T(rng), t = tau + T(rng), D = T(rng);
    exact = exact && green({x, t, xi, tau, D}) == -green({-x, t, xi, tau, D}) &&
            neumann({x, t, xi, tau, D}) == neumann({-x, t, xi, tau, D});
  }
  o.require(exact, "reflection symmetry");

  double heat_rel = 0.0;
  std::uniform_real_distribution<double> Y(-2, 2), S(0.01, 1.5);
  for (int i = 0; i < 300; ++i) {
    const double x = Y(rng), xi = Y(rng), s = S(rng), D = S(rng), tau = 0.2, t = tau + s;
    for (auto fn : {heat_kernel, green, neumann}) {
      const double r2 = std::max((x - xi) * (x - xi), (x + xi) * (x + xi));
      const double h = 1e-3 * s / (1.0 + r2 / (4 * D * s));
      auto K = [&](double e) { return fn({x, t + e, xi, tau, D, Deriv::value}); };
      const double kt = (8 * (K(h) - K(-h)) - (K(2 * h) - K(-2 * h))) / (12 * h);
      const double kxx = fn({x, t, xi, tau, D, Deriv::d_field2});
      const double scale = std::abs(D * kxx) + std::abs(K(0)) / s + 1e-300;
      heat_rel = std::max(heat_rel, std::abs(kt - D * kxx) / scale);
    }
  }
  o.require(heat_rel <= 1e-6, "heat residual " + fmt(heat_rel));

  std::uniform_real_distribution<double> A(0.1, 10), X(0.01, 3), SS(1e-4, 2);
  bool bound = true;
  for (int i = 0; i < 1000; ++i) {
    const double a = A(rng), x = X(rng), s = SS(rng);
    for (int n : {1, 2, 3})
      bound = bound && std::exp(-x * x / (a * s)) / std::pow(s, n / 2.0) <=
                           std::pow(n * a / (2 * std::numbers::e * x * x), n / 2.0) * (1 + 1e-12);
  }
  o.require(bound, "exponential bound");
  const double secs = elapsed_since(t0);
  o.require(secs < 5.0, "runtime " + fmt(secs) + " s");
  o.note("normalisation " + fmt(norm_err) + ", heat rel " + fmt(heat_rel));
  return o;
}

Outcome quadrature() {
  Outcome o;
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> U(-1, 1);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 20 + static_cast<std::size_t>(trial);
    const double dt = 1.0 / static_cast<double>(n);
    std::vector<double> v(n + 1);
    for (auto& x : v) x = U(rng);
    GridFunction g(0, dt, v);
    const std::size_t k = n - static_cast<std::size_t>(trial % 7);
    const double t = g.time(k);
    long double ref = 0;
    for (std::size_t j = 0; j < k; ++j) {
      const long double a = t - g.time(j), b = t - g.time(j + 1);
      const long double i0 = 2 * (std::sqrt(a) - std::sqrt(b));
      const long double i1 = 2.0L / 3.0L * (a * std::sqrt(a) - b * std::sqrt(b));
      const long double slope = (v[j + 1] - v[j]) / dt;
      ref += (v[j] + slope * a) * i0 - slope * i1;
    }
    worst = std::max(worst, std::abs(integrate_abel(g, k) - static_cast<double>(ref)));
  }
  o.require(worst <= 1e-13, "abel exactness " + fmt(worst));
  auto f = [](double x) { return std::exp(x) * std::cos(3 * x); };
  const double exact = (std::exp(1.0) * (std::cos(3.0) + 3 * std::sin(3.0)) - 1) / 10.0;
  double prev = 0.0, min_ratio = 1e300;
  for (int n = 10; n <= 640; n *= 2) {
    const double err = std::abs(integrate_smooth(f, 0, 1, 1.0 / n) - exact);
    if (n > 10) min_ratio = std::min(min_ratio, prev / err);
    prev = err;
  }
  o.require(min_ratio >= 3.9, "smooth ratio " + fmt(min_ratio));
  o.note("abel max error " + fmt(worst) + ", smallest halving ratio " + fmt(min_ratio));
  return o;
}

Outcome transforms() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  auto u = FieldFunction::sample(0.0, 1.0 / 200, 201, [](double t) { return linspace(0.0, 1.0 + 0.5 * t, 200); },
                                 [](double x, double t) { return 1.0 + 0.3 * std::exp(-t) * std::cos(x); });
  const double hod = node_distance(hodograph_inverse(hodograph_forward(u, 0.8, 0.25).v).u, u);
  o.require(hod <= 1e-6, "hodograph " + fmt(hod));

  auto nodes = [](double t) { return linspace(-0.2 * t, 1.0 + 0.3 * t, 200); };
  auto v = FieldFunction::sample(0.0, 1.0 / 200, 201, nodes, [](double y, double t) { return 0.5 * std::sin(y + t) + 0.2; });
  const double gal = node_distance(
      galilean_shift(galilean_shift(v, 0.37, Direction::forward).field, 0.37, Direction::inverse).field, v);
  o.require(gal <= 1e-6, "galilean " + fmt(gal));

  const double D = 0.9;
  auto C = GridFunction::sample(0.0, 1.0 / 200, 201, [](double t) { return 1.0 + 0.1 * t; });
  const double hc = node_distance(hopf_cole_inverse(hopf_cole_forward(v, D, &C).w, C, D), v);
  o.require(hc <= 1e-6, "hopf-cole " + fmt(hc));

  fixtures::HeatChain chain;
  const auto r1 = fixtures::run_chain(chain, 40), r2 = fixtures::run_chain(chain, 80), r3 = fixtures::run_chain(chain, 160);
  double min_order = 1e300;
  for (auto [a, b, c] : {std::tuple{r1.heat, r2.heat, r3.heat}, std::tuple{r1.burgers_V, r2.burgers_V, r3.burgers_V},
                         std::tuple{r1.burgers_v, r2.burgers_v, r3.burgers_v}, std::tuple{r1.calor, r2.calor, r3.calor}})
    min_order = std::min({min_order, std::log2(a / b), std::log2(b / c)});
  o.require(min_order >= 1.0, "chain order " + fmt(min_order));
  const double secs = elapsed_since(t0);
  o.require(secs < 30.0, "runtime " + fmt(secs) + " s");
  o.note("round trips " + fmt(hod) + " / " + fmt(gal) + " / " + fmt(hc) + ", chain order " + fmt(min_order));
  return o;
}

Outcome mms() {
  Outcome o;
  const auto y0 = straight_curve(0.5, -0.1), y1 = straight_curve(1.0, 0.2);
  MmsSettings s;
  s.n = 400;
  const double lin = mms_representation_check(mms_linear(0.3, 1.0), y0, y1, s).error;
  const double quad = mms_representation_check(mms_quadratic(1.0), y0, y1, s).error;
  s.n = 200;
  const double quad_coarse = mms_representation_check(mms_quadratic(1.0), y0, y1, s).error;
  const double ratio = quad_coarse / quad;
  o.require(lin <= 1e-4, "linear " + fmt(lin));
  o.require(quad <= 1e-3, "quadratic " + fmt(quad));
  o.require(ratio >= 1.8, "ratio " + fmt(ratio));
  o.note("w = y: " + fmt(lin) + ", w = 2Dt + y^2: " + fmt(quad) + ", halving ratio " + fmt(ratio));
  return o;
}

Outcome jumps() {
  Outcome o;
  const std::size_t n = 200;
  const double dt = 1.0 / static_cast<double>(n);
  const auto one = GridFunction::constant(0, dt, n + 1, 1.0);
  const auto still = GridFunction::constant(0, dt, n + 1, 0.7);
  const auto psi = GridFunction::sample(0, dt, n + 1, [](double t) { return t; });
  const auto slope = GridFunction::sample(0, dt, n + 1, [](double t) { return 0.7 + 0.3 * t; });
  double st = 0.0, mv = 0.0;
  for (auto side : {Side::above, Side::below}) {
    const auto a = jump_relation_check(one, still, side, 1.0);
    // the static limit is known in closed form: -/+ 1/(2D)
    const double closed = side == Side::above ? -0.5 : 0.5;
    st = std::max({st, a.mismatch, std::abs(a.limit - closed)});
    mv = std::max(mv, jump_relation_check(psi, slope, side, 0.8).mismatch);
  }
  o.require(st <= 1e-3, "static " + fmt(st));
  o.require(mv <= 5e-3, "moving " + fmt(mv));
  o.note("static mismatch " + fmt(st) + ", moving mismatch " + fmt(mv));
  return o;
}

struct Certified {
  ProblemData d = fixtures::certified();
  DerivedData der;
  Certificate cert;
  Certified() {
    der = derive_constants(d).derived;
    cert = compute_certificate(d, der);
  }
};

Outcome inner(const Certified& c) {
  Outcome o;
  o.require(c.cert.valid, "certificate valid");
  if (!c.cert.valid) return o;
  const double sigma = c.cert.sigma_max, tol = 1e-10;
  const auto ctx = make_context(c.d, c.der, build_initial_profiles(c.d, c.der, 4000), SolverGrid{sigma, 400});
  const auto tr = initial_trace(ctx);
  const auto r = picard_solve(tr, ctx, tol, 200);
  o.require(r.converged, "picard converged");
  const double H2 = c.cert.H2(sigma);
  double ratio = r.max_ratio;
  if (r.ratios_measured == 0 && r.history.size() >= 2) ratio = r.history[1] / r.history[0];
  o.require(ratio <= H2, "ratio " + fmt(ratio) + " > H2 " + fmt(H2));

  Densities start{ctx.grid.sample([](double t) { return -0.3 + t; }), ctx.grid.sample([](double) { return 0.5; })};
  const auto r2 = picard_solve(tr, ctx, tol, 200, &start);
  const double dist = sigma_distance(r.phi, r2.phi);
  o.require(r2.converged && dist <= 2 * tol, "initial guess independence " + fmt(dist));

  const double eps = 1e-4 * (ctx.profiles.C2 - ctx.profiles.C1);
  double w1max = 0.0, rec = 0.0;
  for (std::size_t k = 1; k <= 400; k += 21) {
    const auto y0 = r.curves.y0.point(k), y1 = r.curves.y1.point(k);
    auto w = [&](Point p) { return eval_w(p, k, r.phi, tr, r.curves, ctx); };
    const double a = w(y1), b = w({y1.origin, y1.offset - eps}), cc = w({y1.origin, y1.offset - 2 * eps});
    const double p = w(y0), q = w({y0.origin, y0.offset + eps}), s = w({y0.origin, y0.offset + 2 * eps});
    w1max = std::max(w1max, std::abs(a));
    rec = std::max(rec, std::abs((3 * a - 4 * b + cc) / (2 * eps) - r.phi.phi1[k]));
    rec = std::max(rec, std::abs((-3 * p + 4 * q - s) / (2 * eps) - r.phi.phi2[k]));
  }
  o.require(w1max <= 1e-4, "w(y1) " + fmt(w1max));
  o.require(rec <= 5e-2, "density recovery " + fmt(rec));
  o.note(std::to_string(r.iterations) + " iterations, ratio " + fmt(ratio) + " vs H2 " + fmt(H2) + ", |w(y1)| " +
         fmt(w1max) + ", recovery " + fmt(rec));
  return o;
}

Outcome outer(const Certified& c) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  o.require(c.cert.valid, "certificate valid");
  if (!c.cert.valid) return o;
  const double sigma = c.cert.sigma_max;
  const auto ctx = make_context(c.d, c.der, build_initial_profiles(c.d, c.der, 4000), SolverGrid{sigma, 400});
  OuterOptions opts;
  opts.field_nodes = 400;
  opts.pi = PiSpec{c.cert.H, c.cert.R, c.cert.S, sigma};
  const auto b = solve_outer(ctx, opts);
  o.require(b.converged, "outer converged");
  if (!b.converged) return o;
  const auto z = Z_map(b.h, ctx, opts.picard_tol, opts.max_iter, &b.phi);
  double zres = 0.0;
  for (std::size_t k = 0; k < b.h.h.size(); ++k) zres = std::max(zres, std::abs(z.Z.h[k] - b.h.h[k]));
  o.require(zres <= 1e-8, "|Z(h) - h| " + fmt(zres));
  const auto p = reconstruct_solution(b, ctx);
  const auto rep = residual_suite(b, p, ctx);
  const double uf = rep.sup("u_left_minus_f"), ub = rep.sup("u_front_minus_beta"), st = rep.sup("stefan");
  const double s0 = std::abs(p.s[0] - c.d.b);
  o.require(uf <= 1e-4, "|u(0,t) - f| " + fmt(uf));
  o.require(ub <= 1e-6, "|u(s,t) - beta| " + fmt(ub));
  o.require(s0 <= 1e-6, "|s(0) - b| " + fmt(s0));
  o.require(st <= 5e-2, "Stefan " + fmt(st));
  const double secs = elapsed_since(t0);
  o.require(secs < 300.0, "runtime " + fmt(secs) + " s");
  o.note("sigma " + fmt(sigma) + ", " + std::to_string(b.outer_iterations) + " outer iterations, |Z(h)-h| " + fmt(zres) +
         ", |u(0)-f| " + fmt(uf) + ", |u(s)-beta| " + fmt(ub) + ", |s(0)-b| " + fmt(s0) + ", Stefan " + fmt(st));
  return o;
}

Outcome certificate() {
  Outcome o;
  std::ifstream fh(std::string(ORACLE_DIR) + "/certificate_expected.json");
  o.require(static_cast<bool>(fh), "oracle file");
  if (!fh) return o;
  const auto cases = nlohmann::json::parse(fh);
  double worst = 0.0;
  std::size_t compared = 0;
  for (const auto& cs : cases) {
    const auto& j = cs.at("inputs");
    CertificateInputs in{j.at("D"), j.at("beta"), j.at("C1"), j.at("U0"), j.at("nu0"), j.at("nu0p"), j.at("nf"), j.at("nfp")};
    HypothesisReport r;
    add_smallness_checks(r, in);
    const auto c = compute_certificate(in, r);
    const auto& x = cs.at("expected");
    o.require(c.valid == x.at("valid").get<bool>(), cs.at("name").get<std::string>() + " validity");
    if (!c.valid) continue;
    const auto k = to_json(c).at("constants");
    for (auto it = x.begin(); it != x.end(); ++it) {
      if (it.key() == "valid") continue;
      const double e = it->get<double>();
      worst = std::max(worst, std::abs(k.at(it.key()).get<double>() - e) / std::abs(e));
      ++compared;
    }
  }
  o.require(worst <= 1e-12, "oracle agreement " + fmt(worst));

  auto d = fixtures::certified();
  o.require(compute_certificate(d, derive_constants(d).derived).valid, "certified dataset accepted");
  d.D = 2.5;
  const auto bad_d = compute_certificate(d, derive_constants(d).derived);
  o.require(!bad_d.valid && !bad_d.hypotheses.passed("D_range"), "D = 2.5 rejected");
  CertificateInputs ipp{1.0, 0.1, 0.2, 1.5767, 2.0, 1.0, 2.0, 0.0};
  HypothesisReport r;
  add_smallness_checks(r, ipp);
  o.require(!r.passed("ipp") && !compute_certificate(ipp, r).valid, "ipp violation flagged");
  o.note(std::to_string(compared) + " constants, worst relative difference " + fmt(worst));
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

Outcome determinism() {
  Outcome o;
  const auto dir = fs::temp_directory_path() / ("fbsolve_accept_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto cfg = dir / "run.config";
  std::ofstream(cfg) << "D = 1\nbeta = 0.5\nb = 0.5\nC1 = 0.3\nu0.poly = 1 -1\nf.poly = 1 0.2\n"
                        "n_time = 20\nn_space = 20\nsigma = 0.02\n";
  std::size_t files = 0;
  for (const char* cmd : {"certify", "solve", "verify", "mms"}) {
    const auto a = dir / (std::string(cmd) + "_a"), b = dir / (std::string(cmd) + "_b");
    const std::string config = std::string(cmd) == "certify" ? std::string(CONFIG_DIR) + "/certified.config" : cfg.string();
    for (const auto& out : {a, b}) {
      const std::string line = std::string(FBSOLVE_PATH) + " " + cmd + " --config " + config + " --out " +
                               out.string() + " --emit-field > /dev/null 2>&1";
      o.require(std::system(line.c_str()) == 0, std::string(cmd) + " exit status");
    }
    for (const auto& e : fs::directory_iterator(a)) {
      if (e.path().extension() != ".csv") continue;
      ++files;
      o.require(slurp(e.path()) == slurp(b / e.path().filename()), std::string(cmd) + " " + e.path().filename().string());
    }
    auto ma = nlohmann::json::parse(slurp(a / "manifest.json")), mb = nlohmann::json::parse(slurp(b / "manifest.json"));
    ma.erase("timestamp");
    mb.erase("timestamp");
    o.require(ma == mb, std::string(cmd) + " manifest");
  }
  fs::remove_all(dir);

  const double tol = 1e-10;
  const auto d = fixtures::moderate();
  const auto der = derive_constants(d).derived;
  const auto prof = build_initial_profiles(d, der, 4000);
  const auto full = make_context(d, der, prof, SolverGrid{0.05, 40});
  const auto half = make_context(d, der, prof, SolverGrid{0.025, 20});
  const auto rf = picard_solve(initial_trace(full), full, tol, 200);
  const auto rh = picard_solve(initial_trace(half), half, tol, 200);
  double diff = 0.0;
  for (std::size_t k = 0; k <= 20; ++k)
    diff = std::max({diff, std::abs(rf.phi.phi1[k] - rh.phi.phi1[k]), std::abs(rf.phi.phi2[k] - rh.phi.phi2[k])});
  o.require(rf.converged && rh.converged && diff <= tol, "truncated horizon " + fmt(diff));
  o.note(std::to_string(files) + " CSV files identical, truncation difference " + fmt(diff));
  return o;
}

} // namespace

int main() {
  criterion(1, "kernel suite", kernels);
  criterion(2, "quadrature exactness", quadrature);
  criterion(3, "transform round trips", transforms);
  criterion(4, "Green identity MMS", mms);
  criterion(5, "jump relations", jumps);
  const Certified c;
  criterion(6, "inner solver", [&] { return inner(c); });
  criterion(7, "outer solver end to end", [&] { return outer(c); });
  criterion(8, "certificate", certificate);
  criterion(9, "determinism and causality", determinism);
  return failures;
}
