#include "fbp/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include <boost/math/interpolators/pchip.hpp>

#include "fbp/errors.hpp"

namespace fbp {

std::vector<double> time_derivative(const std::vector<double>& v, double dt) {
  const std::size_t n = v.size();
  std::vector<double> d(n, 0.0);
  if (n < 3) {
    if (n == 2) d[0] = d[1] = (v[1] - v[0]) / dt;
    return d;
  }
  d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dt);
  for (std::size_t k = 1; k + 1 < n; ++k) d[k] = (v[k + 1] - v[k - 1]) / (2.0 * dt);
  d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * dt);
  return d;
}

FieldFunction ParametricSolution::as_field() const {
  FieldFunction f;
  f.t0 = 0.0;
  f.dt = dt;
  f.nodes = x;
  f.values = u;
  return f;
}

namespace {

// derivative at x2 of the quadratic through three points
double end_slope(double x0, double u0, double x1, double u1, double x2, double u2) {
  const double h1 = x2 - x1, h0 = x1 - x0;
  return u0 * h1 / (h0 * (h0 + h1)) - u1 * (h0 + h1) / (h0 * h1) + u2 * (h0 + 2.0 * h1) / (h1 * (h0 + h1));
}

} // namespace

ParametricSolution reconstruct_solution(const SolutionBundle& b, const VolterraContext& ctx) {
  if (!b.converged) throw InvalidData("reconstruction needs a converged bundle");
  if (b.field.empty()) throw InvalidField("reconstruction needs field samples");
  const std::size_t L = ctx.grid.levels();
  if (b.field.w.size() != L) throw InvalidField("field samples do not match the time grid");
  const double D = ctx.data.D, beta = ctx.data.beta, E0 = ctx.profiles.E_C1;
  const double gap0 = b.curves.y1.origin - b.curves.y0.origin;

  ParametricSolution p;
  p.dt = ctx.grid.dt();
  p.y = b.field.y;
  p.x.resize(L);
  p.u.resize(L);
  p.cden.resize(L);
  p.ux_front.assign(L, 0.0);
  p.ux_front_sampled.assign(L, 0.0);
  p.s0 = D * std::log(E0) + beta * gap0;
  std::vector<double> ds(L), kappa(L, 1.0);
  for (std::size_t k = 0; k < L; ++k) {
    p.t.push_back(ctx.grid.time(k));
    const double dC = b.dC[k], dM = b.dM[k];
    if (!(1.0 + dC > 0.0)) throw HorizonExceeded("C(t) reached zero", k);
    const double rel = (dC + dM / D) / E0;
    if (!(1.0 + rel > 0.0)) throw HorizonExceeded("E(t) reached zero", k);
    ds[k] = D * (std::log1p(rel) - std::log1p(dC)) +
            beta * (b.curves.y1.offset[k] - b.curves.y0.offset[k]);
  }

  std::exception_ptr err;
  std::size_t bad = L;
#pragma omp parallel for schedule(static)
  for (std::size_t k = 0; k < L; ++k) {
    try {
      const auto& y = p.y[k];
      const auto& w = b.field.w[k];
      const std::size_t n = y.size();
      if (n < 3) throw InvalidField("too few field samples per slice");
      const double C = 1.0 + b.dC[k];
      const double excess = ctx.profiles.M0 / D + b.dM[k] / D; // E - C
      std::vector<double> left(n, 0.0);
      for (std::size_t i = 1; i < n; ++i) left[i] = left[i - 1] + 0.5 * separation(y[i], y[i - 1]) * (w[i - 1] + w[i]);
      const double total = left.back();
      double kap = 1.0;
      if (std::abs(total) > 1e3 * std::numeric_limits<double>::min() && std::abs(excess) > 0.0)
        kap = D * excess / total;
      kappa[k] = kap;
      auto& x = p.x[k];
      auto& u = p.u[k];
      auto& cd = p.cden[k];
      x.assign(n, 0.0);
      u.assign(n, beta);
      cd.assign(n, C);
      const double E = C + excess;
      for (std::size_t i = 0; i < n; ++i) {
        const double inner = kap * left[i] / D;   // E - Cden(y_i)
        cd[i] = i + 1 == n ? C : E - inner;
        if (!(cd[i] > 0.0)) throw HorizonExceeded("Cden reached zero", k);
        u[i] = w[i] / cd[i] + beta;
        x[i] = D * std::log1p(inner / cd[i]) + beta * separation(y[i], y[0]);
      }
      x[0] = 0.0;
      x[n - 1] = p.s0 + ds[k];
      u[n - 1] = beta;
      // w vanishes on y1, so x_y = beta and u_y = phi1 / C there
      p.ux_front[k] = b.phi.phi1[k] / (beta * C);
      p.ux_front_sampled[k] = end_slope(x[n - 3], u[n - 3], x[n - 2], u[n - 2], x[n - 1], u[n - 1]);
    } catch (const HorizonExceeded&) {
#pragma omp critical
      {
        bad = std::min(bad, k);
        if (!err) err = std::current_exception();
      }
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (bad < L) throw HorizonExceeded("Cden reached zero", bad);
  if (err) std::rethrow_exception(err);

  p.ds = GridFunction(0.0, p.dt, ds);
  std::vector<double> s(L);
  for (std::size_t k = 0; k < L; ++k) s[k] = p.s0 + ds[k];
  p.s = GridFunction(0.0, p.dt, s);
  p.sdot = GridFunction(0.0, p.dt, time_derivative(ds, p.dt));

  p.min_u_minus_beta = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < L; ++k) {
    p.mass_scale_max_dev = std::max(p.mass_scale_max_dev, std::abs(kappa[k] - 1.0));
    const auto& x = p.x[k];
    for (std::size_t i = 1; i < x.size(); ++i)
      if (!(x[i] > x[i - 1])) {
        if (p.monotone) p.monitors.push_back("x not increasing at level " + std::to_string(k));
        p.monotone = false;
      }
    for (std::size_t i = 0; i + 1 < x.size(); ++i) p.min_u_minus_beta = std::min(p.min_u_minus_beta, p.u[k][i] - beta);
  }
  if (!(p.min_u_minus_beta > 0.0)) p.monitors.push_back("u <= beta inside the domain");
  return p;
}

UniformSlice resample_uniform_x(const ParametricSolution& p, std::size_t k, std::size_t n) {
  if (k >= p.levels()) throw OutOfDomain("time level out of range");
  if (n < 1) throw InvalidData("need at least one interval");
  if (!p.monotone) throw InvalidField("x is not monotone; cannot resample");
  std::vector<double> xs = p.x[k], us = p.u[k];
  UniformSlice out;
  const double s = xs.back();
  out.x.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) out.x[i] = s * static_cast<double>(i) / static_cast<double>(n);
  out.x.back() = s;
  if (xs.size() < 4) {
    for (double xx : out.x) {
      auto it = std::upper_bound(xs.begin(), xs.end(), xx);
      const std::size_t j = std::clamp<std::size_t>(static_cast<std::size_t>(it - xs.begin()), 1, xs.size() - 1);
      const double a = (xx - xs[j - 1]) / (xs[j] - xs[j - 1]);
      out.u.push_back((1 - a) * us[j - 1] + a * us[j]);
    }
    return out;
  }
  boost::math::interpolators::pchip<std::vector<double>> ip(std::move(xs), std::move(us));
  for (double xx : out.x) out.u.push_back(ip(xx));
  return out;
}

} // namespace fbp
