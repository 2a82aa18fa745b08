#include "fbp/data_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace fbp {

namespace {

template <class F>
double gk(F&& f, double a, double b) {
  if (a == b) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, 1e-14);
}

// short cells of a fine grid: fixed Gauss-Legendre is at rounding level already
template <class F>
double gl(F&& f, double a, double b) {
  if (a == b) return 0.0;
  return boost::math::quadrature::gauss<double, 15>::integrate(f, a, b);
}

std::size_t table_cell(const std::vector<double>& xs, double x) {
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t k = it == xs.begin() ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
  return std::min(k, xs.size() - 2);
}

} // namespace

FunctionSpec FunctionSpec::polynomial(std::vector<double> c) {
  if (c.empty()) throw InvalidData("polynomial needs at least one coefficient");
  FunctionSpec s;
  s.kind = Kind::polynomial;
  s.coeffs = std::move(c);
  return s;
}

FunctionSpec FunctionSpec::table(std::vector<double> x, std::vector<double> y,
                                 std::vector<double> dy) {
  if (x.size() < 2 || x.size() != y.size())
    throw InvalidData("table needs at least two (x, y) pairs of equal length");
  if (!dy.empty() && dy.size() != x.size())
    throw InvalidData("table derivative payload must match the sample count");
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1])) throw InvalidData("table abscissae must be strictly increasing");
  FunctionSpec s;
  s.kind = Kind::table;
  s.xs = std::move(x);
  s.ys = std::move(y);
  s.dys = std::move(dy);
  const std::size_t n = s.xs.size();
  if (!s.dys.empty()) {
    s.slopes = s.dys;
    return s;
  }
  // Fritsch-Carlson monotone slopes
  std::vector<double> h(n - 1), d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = s.xs[i + 1] - s.xs[i];
    d[i] = (s.ys[i + 1] - s.ys[i]) / h[i];
  }
  s.slopes.assign(n, 0.0);
  s.slopes[0] = d[0];
  s.slopes[n - 1] = d[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (d[i - 1] * d[i] <= 0.0) continue;
    const double w1 = 2 * h[i] + h[i - 1], w2 = h[i] + 2 * h[i - 1];
    s.slopes[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
  }
  return s;
}

double FunctionSpec::operator()(double x) const {
  if (kind == Kind::polynomial) {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
  }
  const std::size_t k = table_cell(xs, x);
  const double h = xs[k + 1] - xs[k];
  const double th = (x - xs[k]) / h;
  const double th2 = th * th, th3 = th2 * th;
  return (2 * th3 - 3 * th2 + 1) * ys[k] + (th3 - 2 * th2 + th) * h * slopes[k] +
         (-2 * th3 + 3 * th2) * ys[k + 1] + (th3 - th2) * h * slopes[k + 1];
}

double FunctionSpec::derivative(double x) const {
  if (kind == Kind::polynomial) {
    double acc = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 1;) acc = acc * x + static_cast<double>(i) * coeffs[i];
    return acc;
  }
  const std::size_t k = table_cell(xs, x);
  const double h = xs[k + 1] - xs[k];
  const double th = (x - xs[k]) / h;
  const double th2 = th * th;
  return ((6 * th2 - 6 * th) * ys[k] + (-6 * th2 + 6 * th) * ys[k + 1]) / h +
         (3 * th2 - 4 * th + 1) * slopes[k] + (3 * th2 - 2 * th) * slopes[k + 1];
}

std::string FunctionSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (kind == Kind::polynomial) {
    os << "poly";
    for (double c : coeffs) os << ' ' << c;
  } else {
    os << "table";
    for (std::size_t i = 0; i < xs.size(); ++i) os << ' ' << xs[i] << ':' << ys[i];
  }
  return os.str();
}

bool HypothesisReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const HypothesisCheck* HypothesisReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

bool HypothesisReport::passed(const std::string& name) const {
  const auto* c = find(name);
  return c != nullptr && c->passed;
}

std::vector<std::string> HypothesisReport::failures() const {
  std::vector<std::string> out;
  for (const auto& c : checks)
    if (!c.passed) out.push_back(c.name);
  return out;
}

DeriveResult derive_constants(const ProblemData& data, std::size_t n) {
  if (!(std::isfinite(data.D) && std::isfinite(data.beta) && std::isfinite(data.b) &&
        std::isfinite(data.C1)))
    throw InvalidData("non-finite problem parameter");
  if (!(data.b > 0.0)) throw InvalidData("b must be positive");
  if (n < 2) n = 2;
  DeriveResult out;
  auto& d = out.derived;
  auto& rep = out.report.checks;

  double min_u0 = INFINITY, min_above = INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = data.b * static_cast<double>(i) / static_cast<double>(n - 1);
    const double u = data.u0(x);
    if (!std::isfinite(u)) throw InvalidData("u0 is not finite on [0,b]");
    min_u0 = std::min(min_u0, u);
    d.norm_u0 = std::max(d.norm_u0, std::abs(u));
    d.norm_u0prime_over_u0 = std::max(d.norm_u0prime_over_u0, std::abs(data.u0.derivative(x) / u));
    if (i + 1 < n) min_above = std::min(min_above, u - data.beta);
  }
  if (!(min_u0 > 0.0)) throw InvalidData("u0 must be positive on [0,b]");

  const double sig = data.sigma_request > 0.0 ? data.sigma_request : 1.0;
  double min_f = INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = sig * static_cast<double>(i) / static_cast<double>(n - 1);
    const double fv = data.f(t);
    if (!std::isfinite(fv)) throw InvalidData("f is not finite on the horizon");
    min_f = std::min(min_f, fv);
    d.norm_f = std::max(d.norm_f, std::abs(fv));
    d.norm_fprime = std::max(d.norm_fprime, std::abs(data.f.derivative(t)));
  }

  d.U0 = gk([&](double x) { return 1.0 / data.u0(x); }, 0.0, data.b);
  d.C2 = data.C1 + d.U0;

  auto add = [&](std::string name, double margin, std::string detail) {
    rep.push_back({std::move(name), margin > 0.0, margin, std::move(detail)});
  };
  add("D_range", std::min(data.D, 2.0 - data.D), "0 < D < 2");
  add("beta_positive", data.beta, "beta > 0");
  add("C1_positive", data.C1, "C1 > 0");
  add("C1_range", d.U0 / 2.0 - data.C1, "C1 < U0/2");
  add("u0_above_beta", min_above, "u0 > beta on [0,b)");
  const double rel_b = std::abs(data.u0(data.b) - data.beta) / std::max(1.0, std::abs(data.beta));
  add("u0_b_equals_beta", 1e-8 - rel_b, "u0(b) = beta (relative tol 1e-8)");
  const double f0 = data.f(0.0);
  const double rel_0 = std::abs(data.u0(0.0) - f0) / std::max(std::abs(f0), 1e-300);
  add("u0_0_equals_f0", 1e-8 - rel_0, "u0(0) = f(0) (relative tol 1e-8)");
  add("hip", min_f - 1.5 * data.beta, "f > 3 beta / 2 on [0, sigma]");
  return out;
}

double InitialProfiles::g(double xx) const {
  return C1 + gk([&](double s) { return 1.0 / u0(s); }, 0.0, xx);
}

double InitialProfiles::g_inv(double zz) const {
  if (zz <= C1) return 0.0;
  if (zz >= C2) return b;
  // start from the tabulated inverse, refine with safeguarded Newton
  const std::size_t k = std::min(static_cast<std::size_t>((zz - C1) / dz), cells() - 1);
  double lo = x[k], hi = x[k + 1];
  double xx = lo + (hi - lo) * (zz - z[k]) / dz;
  const double base = lo, gz = g(base);
  for (int it = 0; it < 60; ++it) {
    const double r = gz + gl([&](double s) { return 1.0 / u0(s); }, base, xx) - zz;
    if (r > 0.0) hi = xx; else lo = xx;
    double next = xx - r * u0(xx);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - xx) <= 1e-15 * std::max(1.0, b)) return next;
    if (hi - lo <= 1e-13 * b) return next;
    xx = next;
  }
  return xx;
}

namespace {

double lerp_table(const std::vector<double>& v, double C1, double dz, double zz) {
  const double r = (zz - C1) / dz;
  const auto n = v.size();
  if (r <= 0.0) return v.front();
  if (r >= static_cast<double>(n - 1)) return v.back();
  const auto k = static_cast<std::size_t>(r);
  const double th = r - static_cast<double>(k);
  return v[k] + th * (v[k + 1] - v[k]);
}

} // namespace

double InitialProfiles::v0_at(double zz) const { return lerp_table(v0, C1, dz, zz); }
double InitialProfiles::F_at(double zz) const { return lerp_table(F, C1, dz, zz); }
double InitialProfiles::Fp_at(double zz) const { return lerp_table(Fp, C1, dz, zz); }

InitialProfiles build_initial_profiles(const ProblemData& data, const DerivedData& derived,
                                       std::size_t n_cells) {
  if (n_cells < 4) n_cells = 4;
  InitialProfiles p;
  p.C1 = data.C1;
  p.C2 = derived.C2;
  p.D = data.D;
  p.beta = data.beta;
  p.b = data.b;
  p.u0 = data.u0;
  const std::size_t n = n_cells + 1;
  p.dz = (p.C2 - p.C1) / static_cast<double>(n_cells);
  p.z.resize(n);
  p.x.resize(n);
  auto inv_u0 = [&](double s) {
    const double u = data.u0(s);
    if (!(u > 0.0)) throw InvalidData("u0 must be positive (g is not monotone)");
    return 1.0 / u;
  };

  // march x along the z-grid: solve C1 + int_0^x 1/u0 = z_i incrementally
  p.z[0] = p.C1;
  p.x[0] = 0.0;
  double g_prev = p.C1;
  for (std::size_t i = 1; i < n; ++i) {
    p.z[i] = i + 1 == n ? p.C2 : p.C1 + p.dz * static_cast<double>(i);
    if (i + 1 == n) {
      p.x[i] = data.b;
      break;
    }
    const double target = p.z[i];
    double lo = p.x[i - 1], hi = data.b;
    double xx = lo + (target - g_prev) * data.u0(lo);
    if (!(xx > lo && xx < hi)) xx = 0.5 * (lo + hi);
    double gx = g_prev;
    for (int it = 0; it < 100; ++it) {
      gx = g_prev + gl(inv_u0, p.x[i - 1], xx);
      const double r = gx - target;
      if (r > 0.0) hi = xx; else lo = xx;
      double next = xx - r * data.u0(xx);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      const bool done = std::abs(next - xx) <= 1e-15 * data.b || hi - lo <= 1e-14 * data.b;
      xx = next;
      if (done) break;
    }
    p.x[i] = xx;
    g_prev = g_prev + gl(inv_u0, p.x[i - 1], xx);
  }

  p.v0.resize(n);
  p.V0.resize(n);
  p.V0p.resize(n);
  p.logE.assign(n, 0.0);
  p.F.resize(n);
  p.Fp.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = data.u0(p.x[i]);
    p.v0[i] = u;
    p.V0[i] = u - data.beta;
    p.V0p[i] = data.u0.derivative(p.x[i]) * u;
  }
  if (std::abs(p.V0.back()) <= 1e-8 * std::max(1.0, std::abs(data.beta))) p.V0.back() = 0.0;
  // (1/D) int_z^{C2} V0 = (1/D) int_x^b (1 - beta/u0) dx
  for (std::size_t i = n - 1; i > 0; --i)
    p.logE[i - 1] = p.logE[i] +
                    gl([&](double s) { return 1.0 - data.beta / data.u0(s); }, p.x[i - 1], p.x[i]) /
                        data.D;
  for (std::size_t i = 0; i < n; ++i) {
    const double E = std::exp(p.logE[i]);
    p.F[i] = p.V0[i] * E;
    p.Fp[i] = E * (p.V0p[i] - p.V0[i] * p.V0[i] / data.D);
  }
  p.E_C1 = std::exp(p.logE[0]);
  p.M0 = data.D * std::expm1(p.logE[0]);
  return p;
}

} // namespace fbp
