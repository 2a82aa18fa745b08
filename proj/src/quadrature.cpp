#include "fbp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fbp {

GridFunction::GridFunction(double t0_, double dt_, std::vector<double> v, Interp i)
    : t0(t0_), dt(dt_), values(std::move(v)), interp(i) {
  validate();
}

GridFunction GridFunction::constant(double t0, double dt, std::size_t n, double c) {
  return GridFunction(t0, dt, std::vector<double>(n, c));
}

void GridFunction::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("GridFunction requires dt > 0");
  if (values.size() < 2) throw std::invalid_argument("GridFunction requires at least 2 samples");
}

namespace {

double pchip_slope(const std::vector<double>& v, double dt, std::size_t k) {
  const std::size_t n = v.size();
  auto d = [&](std::size_t j) { return (v[j + 1] - v[j]) / dt; };
  if (k == 0) return d(0);
  if (k == n - 1) return d(n - 2);
  const double a = d(k - 1), b = d(k);
  if (a * b <= 0.0) return 0.0;
  return 2.0 / (1.0 / a + 1.0 / b);
}

} // namespace

double GridFunction::at(double t) const {
  const double r = (t - t0) / dt;
  const auto n = values.size();
  const double kr = std::round(r);
  if (std::abs(r - kr) < 1e-12 && kr >= 0.0 && kr <= static_cast<double>(n - 1))
    return values[static_cast<std::size_t>(kr)];
  std::size_t k = r <= 0.0 ? 0 : std::min(static_cast<std::size_t>(r), n - 2);
  const double th = r - static_cast<double>(k);
  const double a = values[k], b = values[k + 1];
  if (interp == Interp::piecewise_linear) return a + th * (b - a);
  const double ma = pchip_slope(values, dt, k) * dt;
  const double mb = pchip_slope(values, dt, k + 1) * dt;
  const double th2 = th * th, th3 = th2 * th;
  return (2 * th3 - 3 * th2 + 1) * a + (th3 - 2 * th2 + th) * ma + (-2 * th3 + 3 * th2) * b +
         (th3 - th2) * mb;
}

double GridFunction::derivative_at(double t) const {
  const double r = (t - t0) / dt;
  const auto n = values.size();
  std::size_t k = r <= 0.0 ? 0 : std::min(static_cast<std::size_t>(r), n - 2);
  const double th = std::clamp(r - static_cast<double>(k), 0.0, 1.0);
  const double a = values[k], b = values[k + 1];
  if (interp == Interp::piecewise_linear) return (b - a) / dt;
  const double ma = pchip_slope(values, dt, k) * dt;
  const double mb = pchip_slope(values, dt, k + 1) * dt;
  const double th2 = th * th;
  return ((6 * th2 - 6 * th) * a + (3 * th2 - 4 * th + 1) * ma + (-6 * th2 + 6 * th) * b +
          (3 * th2 - 2 * th) * mb) /
         dt;
}

double GridFunction::sup_norm() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double integrate_smooth(const GridFunction& g, double a, double b) {
  if (a > b) throw std::invalid_argument("integrate_smooth requires a <= b");
  const double lo = g.t0, hi = g.t_end();
  const double tol = 1e-12 * (hi - lo);
  if (a < lo - tol || b > hi + tol) throw std::invalid_argument("integration range outside grid");
  auto antideriv = [&](double t) {
    const double r = std::clamp((t - g.t0) / g.dt, 0.0, static_cast<double>(g.size() - 1));
    const std::size_t k = std::min(static_cast<std::size_t>(r), g.size() - 2);
    double acc = 0.0;
    for (std::size_t j = 0; j < k; ++j) acc += 0.5 * g.dt * (g.values[j] + g.values[j + 1]);
    const double th = r - static_cast<double>(k);
    const double va = g.values[k], vb = g.values[k + 1];
    acc += g.dt * (th * va + 0.5 * th * th * (vb - va));
    return acc;
  };
  return antideriv(b) - antideriv(a);
}

double integrate_smooth(const std::function<double(double)>& f, double a, double b, double h) {
  if (a > b) throw std::invalid_argument("integrate_smooth requires a <= b");
  if (!(h > 0.0)) throw std::invalid_argument("integrate_smooth requires h > 0");
  if (a == b) return 0.0;
  const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / h - 1e-9)));
  const double step = (b - a) / static_cast<double>(n);
  double acc = 0.5 * (f(a) + f(b));
  for (std::size_t i = 1; i < n; ++i) acc += f(a + step * static_cast<double>(i));
  return acc * step;
}

std::vector<double> abel_weights(double dt, std::size_t k) {
  std::vector<double> w(k + 1, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    const double a = std::sqrt(dt * static_cast<double>(k - j));
    const double c = std::sqrt(dt * static_cast<double>(k - j - 1));
    const double i0 = 2.0 * dt / (a + c);
    const double jj = 2.0 * dt * (a + 2.0 * c) / (3.0 * (a + c) * (a + c));
    w[j] += jj;
    w[j + 1] += i0 - jj;
  }
  return w;
}

double integrate_abel(const GridFunction& g, std::size_t t_index) {
  if (t_index >= g.size()) throw std::invalid_argument("integrate_abel: t_index out of range");
  const auto w = abel_weights(g.dt, t_index);
  double acc = 0.0;
  for (std::size_t j = 0; j <= t_index; ++j) acc += w[j] * g.values[j];
  return acc;
}

double integrate_volterra_kernel(const GridFunction& g,
                                 const std::function<double(double, double)>& ker,
                                 Singularity cls, std::size_t t_index) {
  if (t_index >= g.size())
    throw std::invalid_argument("integrate_volterra_kernel: t_index out of range");
  const double t = g.time(t_index);
  double acc = 0.0;
  for (std::size_t j = 0; j < t_index; ++j) {
    const double ta = g.time(j), tb = g.time(j + 1);
    const double ga = g.values[j], gb = g.values[j + 1];
    auto dens = [&](double tau) { return ga + (gb - ga) * (tau - ta) / g.dt; };
    auto eval = [&](double tau) {
      const double k = ker(t, tau);
      if (!std::isfinite(k)) throw NumericalFailure("non-finite kernel", tau);
      return dens(tau) * k;
    };
    if (cls == Singularity::inverse_sqrt) {
      const double u_hi = std::sqrt(t - ta);
      const double u_lo = j + 1 == t_index ? 0.0 : std::sqrt(t - tb);
      acc += quad::usub_segment(t, u_lo, u_hi, [&](double tau, double) { return eval(tau); });
    } else {
      acc += quad::gl_segment(ta, tb, eval);
    }
  }
  return acc;
}

GridFunction cumulative_integral(const GridFunction& g) {
  std::vector<double> out(g.size(), 0.0);
  for (std::size_t k = 1; k < g.size(); ++k)
    out[k] = out[k - 1] + 0.5 * g.dt * (g.values[k - 1] + g.values[k]);
  return GridFunction(g.t0, g.dt, std::move(out), g.interp);
}

std::vector<double> node_derivatives(const std::vector<double>& x, const std::vector<double>& f) {
  const std::size_t n = x.size();
  std::vector<double> d(n, 0.0);
  if (n == 2) {
    d[0] = d[1] = (f[1] - f[0]) / (x[1] - x[0]);
    return d;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h1 = x[i] - x[i - 1], h2 = x[i + 1] - x[i];
    d[i] = -h2 / (h1 * (h1 + h2)) * f[i - 1] + (h2 - h1) / (h1 * h2) * f[i] +
           h1 / (h2 * (h1 + h2)) * f[i + 1];
  }
  {
    const double h1 = x[1] - x[0], h2 = x[2] - x[1];
    d[0] = -(2 * h1 + h2) / (h1 * (h1 + h2)) * f[0] + (h1 + h2) / (h1 * h2) * f[1] -
           h1 / (h2 * (h1 + h2)) * f[2];
  }
  {
    const double h1 = x[n - 2] - x[n - 3], h2 = x[n - 1] - x[n - 2];
    d[n - 1] = h2 / (h1 * (h1 + h2)) * f[n - 3] - (h1 + h2) / (h1 * h2) * f[n - 2] +
               (2 * h2 + h1) / (h2 * (h1 + h2)) * f[n - 1];
  }
  return d;
}

std::vector<double> cumulative_nodes(const std::vector<double>& x, const std::vector<double>& f) {
  const std::size_t n = x.size();
  if (n != f.size() || n < 2) throw std::invalid_argument("cumulative_nodes: bad sizes");
  const auto d = node_derivatives(x, f);
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = x[i + 1] - x[i];
    out[i + 1] = out[i] + 0.5 * h * (f[i] + f[i + 1]) - h * h * (d[i + 1] - d[i]) / 12.0;
  }
  return out;
}

std::vector<double> cumulative_nodes_from_right(const std::vector<double>& x,
                                                const std::vector<double>& f) {
  const std::size_t n = x.size();
  if (n != f.size() || n < 2) throw std::invalid_argument("cumulative_nodes: bad sizes");
  const auto d = node_derivatives(x, f);
  std::vector<double> out(n, 0.0);
  for (std::size_t i = n - 1; i > 0; --i) {
    const double h = x[i] - x[i - 1];
    out[i - 1] = out[i] + 0.5 * h * (f[i - 1] + f[i]) - h * h * (d[i] - d[i - 1]) / 12.0;
  }
  return out;
}

double half_erf_diff(double a, double b) {
  if (a >= 0.0 && b >= 0.0) return 0.5 * (std::erfc(a) - std::erfc(b));
  if (a <= 0.0 && b <= 0.0) return 0.5 * (std::erfc(-b) - std::erfc(-a));
  return 0.5 * (std::erf(b) - std::erf(a));
}

double gauss_linear_segment(double lo, double hi, double p, double q, double s, double D) {
  if (!(s > 0.0)) return 0.0;
  const double w = std::sqrt(4.0 * D * s);
  if (lo / w > 27.0 || hi / w < -27.0) return 0.0;
  const double mass = half_erf_diff(lo / w, hi / w);
  double first = 0.0;
  if (q != 0.0) {
    auto k = [&](double r) {
      const double e = -r * r / (w * w);
      return e < -700.0 ? 0.0 : std::exp(e) / (std::sqrt(std::numbers::pi) * w);
    };
    first = 2.0 * D * s * (k(lo) - k(hi));
  }
  return p * mass + q * first;
}

} // namespace fbp
