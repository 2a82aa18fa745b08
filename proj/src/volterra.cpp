#include "fbp/volterra.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <limits>
#include <string>

#include "fbp/errors.hpp"
#include "fbp/kernels.hpp"

namespace fbp {

GridFunction Curve::values() const {
  GridFunction g = offset;
  for (auto& v : g.values) v += origin;
  return g;
}

VolterraContext make_context(const ProblemData& data, const DerivedData& derived,
                             InitialProfiles profiles, const SolverGrid& grid, ChiForm form,
                             ExecPolicy exec) {
  if (!(grid.sigma > 0.0) || grid.n < 1) throw InvalidData("solver grid needs sigma > 0 and n >= 1");
  VolterraContext ctx;
  ctx.data = data;
  ctx.derived = derived;
  ctx.profiles = std::move(profiles);
  ctx.grid = grid;
  ctx.form = form;
  ctx.exec = exec;
  ctx.f = grid.sample([&](double t) { return data.f(t); });
  ctx.fprime = grid.sample([&](double t) { return data.f.derivative(t); });
  for (std::size_t k = 0; k < ctx.f.size(); ++k)
    if (!(ctx.f[k] > 0.0)) throw InvalidData("f must be positive on the horizon");
  return ctx;
}

namespace {

void check_levels(const GridFunction& g, const VolterraContext& ctx, const char* what) {
  if (g.size() != ctx.grid.levels())
    throw InvalidTrace(std::string(what) + " does not match the solver grid");
}

GridFunction trapezoid(const std::vector<double>& rate, double dt) {
  std::vector<double> out(rate.size(), 0.0);
  for (std::size_t k = 1; k < rate.size(); ++k) out[k] = out[k - 1] + 0.5 * dt * (rate[k - 1] + rate[k]);
  return GridFunction(0.0, dt, std::move(out));
}

inline double lerp_cell(const GridFunction& g, std::size_t j, double th) {
  return g.values[j] + th * (g.values[j + 1] - g.values[j]);
}

// int_0^{t_k} fn(j, theta, s, kernels) dtau along a curve, one u-substituted panel per cell
template <class Fn>
double curve_integral(const Point& P, std::size_t k, const Curve& c, double dt, double D, const Fn& fn) {
  const double base = P.origin - c.origin;
  const double sbase = P.origin + c.origin;
  const double t = static_cast<double>(k) * dt;
  double total = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double oj = c.offset[j], oj1 = c.offset[j + 1];
    const double span = static_cast<double>(k - j);
    const double u_lo = std::sqrt((span - 1.0) * dt), u_hi = std::sqrt(span * dt);
    auto dist = [&](double s) {
      const double off = oj + (span - s / dt) * (oj1 - oj);
      return std::array<double, 2>{base + (P.offset - off), sbase + (P.offset + off)};
    };
    auto integrand = [&](double, double s) {
      const double th = span - s / dt;
      const double off = oj + th * (oj1 - oj);
      const auto kp = KernelPair::at(base + (P.offset - off), sbase + (P.offset + off), s, D);
      return fn(j, th, s, kp);
    };
    total += quad::usub_adaptive(t, u_lo, u_hi, integrand, dist, D);
  }
  return total;
}

// int_{C1}^{C2} (k(y - xi, s) + image_sign k(y + xi, s)) g(xi) dxi, g piecewise linear on the profile grid
double initial_integral(const InitialProfiles& p, const std::vector<double>& g, const Point& P,
                        double s, double D, double image_sign) {
  const std::size_t n = p.cells();
  const double yrel = (P.origin - p.C1) + P.offset;
  const double w = std::sqrt(4.0 * D * s);
  const double reach = 27.0 * w;
  auto zr = [&](std::size_t j) { return p.z[j] - p.C1; };
  auto clamp_index = [&](double v) {
    if (!(v > 0.0)) return std::size_t{0};
    return std::min(n, static_cast<std::size_t>(v));
  };
  double total = 0.0;
  {
    const std::size_t jlo = clamp_index((yrel - reach) / p.dz - 1.0);
    const std::size_t jhi = clamp_index((yrel + reach) / p.dz + 2.0);
    for (std::size_t j = jlo; j < jhi; ++j) {
      const double b = (g[j + 1] - g[j]) / (zr(j + 1) - zr(j));
      const double lo = yrel - zr(j + 1), hi = yrel - zr(j);
      total += gauss_linear_segment(lo, hi, g[j] + b * hi, -b, s, D);
    }
  }
  const double shift = yrel + 2.0 * p.C1;
  if (image_sign != 0.0 && shift < reach) {
    const std::size_t jhi = clamp_index((reach - shift) / p.dz + 2.0);
    double img = 0.0;
    for (std::size_t j = 0; j < jhi; ++j) {
      const double b = (g[j + 1] - g[j]) / (zr(j + 1) - zr(j));
      const double lo = shift + zr(j), hi = shift + zr(j + 1);
      img += gauss_linear_segment(lo, hi, g[j] - b * lo, b, s, D);
    }
    total += image_sign * img;
  }
  return total;
}

struct Parts {
  double init = 0.0;  // initial-data term
  double right = 0.0; // layers on y1
  double left = 0.0;  // layers on y0
};

// derivative pieces of the representation, without the single-layer jumps
Parts slope_parts(const Point& P, std::size_t k, const Densities& phi, const TraceFn& tr,
                  const Boundaries& cv, const VolterraContext& ctx, bool direct_form) {
  const auto& p = ctx.profiles;
  const double D = ctx.data.D, beta = ctx.data.beta, dt = ctx.grid.dt();
  const double s = ctx.grid.time(k);
  Parts out;
  out.init = initial_integral(p, p.Fp, P, s, D, 1.0);
  if (!direct_form) {
    const double yrel = (P.origin - p.C1) + P.offset;
    const double span = p.z.back() - p.C1;
    const double nC1 = detail::gauss_value(yrel, s, D) + detail::gauss_value(yrel + 2.0 * p.C1, s, D);
    const double nC2 = detail::gauss_value(yrel - span, s, D) +
                       detail::gauss_value(yrel + 2.0 * p.C1 + span, s, D);
    out.init += (p.F.front() - tr.h[0]) * nC1 - p.F.back() * nC2;
  }
  out.right = curve_integral(P, k, cv.y1, dt, D, [&](std::size_t j, double th, double, const KernelPair& kp) {
    return D * lerp_cell(phi.phi1, j, th) * kp.G_y();
  });
  if (direct_form) {
    out.left = curve_integral(P, k, cv.y0, dt, D, [&](std::size_t j, double th, double, const KernelPair& kp) {
      const double fv = ctx.data.f((static_cast<double>(j) + th) * dt);
      const double h = lerp_cell(tr.h, j, th), p2 = lerp_cell(phi.phi2, j, th);
      return (beta * beta * h / fv - D * beta * p2 / fv) * kp.G_y() - lerp_cell(tr.hprime, j, th) * kp.N();
    });
  } else {
    out.left = curve_integral(P, k, cv.y0, dt, D, [&](std::size_t j, double th, double, const KernelPair& kp) {
      return -D * lerp_cell(phi.phi2, j, th) * kp.G_y() - lerp_cell(tr.hprime, j, th) * kp.N();
    });
  }
  return out;
}

bool same_point(const Point& a, const Point& b) { return a.origin == b.origin && a.offset == b.offset; }

} // namespace

Curve assemble_y1(const GridFunction& phi1, const VolterraContext& ctx) {
  check_levels(phi1, ctx, "phi1");
  const double D = ctx.data.D, beta = ctx.data.beta;
  const auto cum = cumulative_integral(phi1);
  Curve c;
  c.origin = ctx.derived.C2;
  std::vector<double> off(phi1.size());
  for (std::size_t k = 0; k < off.size(); ++k) {
    const double dC = -cum[k];
    if (!(1.0 + dC > 0.0)) throw HorizonExceeded("log argument 1 - int phi1 is not positive", k);
    off[k] = (1.0 - beta) * ctx.grid.time(k) + D * (beta + 1.0) / (beta * beta) * std::log1p(dC);
  }
  c.offset = GridFunction(0.0, ctx.grid.dt(), std::move(off));
  return c;
}

Curve assemble_y0(const GridFunction& phi2, const TraceFn& trace, const VolterraContext& ctx) {
  check_levels(phi2, ctx, "phi2");
  check_levels(trace.h, ctx, "h");
  const double D = ctx.data.D, beta = ctx.data.beta;
  std::vector<double> rate(phi2.size());
  for (std::size_t k = 0; k < rate.size(); ++k) {
    const double f = ctx.f[k];
    rate[k] = -beta * beta / f;
    if (phi2[k] != 0.0) {
      if (!(trace.h[k] > 0.0)) throw InvalidTrace("h must be positive where phi2 is nonzero (node " + std::to_string(k) + ")");
      rate[k] -= D * phi2[k] / trace.h[k] * (1.0 - beta / f);
    }
  }
  Curve c;
  c.origin = ctx.data.C1;
  c.offset = trapezoid(rate, ctx.grid.dt());
  return c;
}

Boundaries assemble_boundaries(const Densities& phi, const TraceFn& trace, const VolterraContext& ctx) {
  Boundaries b{assemble_y0(phi.phi2, trace, ctx), assemble_y1(phi.phi1, ctx)};
  for (std::size_t k = 0; k < ctx.grid.levels(); ++k) {
    if (!(b.y0[k] > 0.0)) throw HorizonExceeded("left boundary reached the reflection line", k);
    if (!(separation(b.y1.point(k), b.y0.point(k)) > 0.0)) throw HorizonExceeded("boundaries crossed", k);
  }
  return b;
}

double eval_w(const Point& y, std::size_t k, const Densities& phi, const TraceFn& trace,
              const Boundaries& cv, const VolterraContext& ctx, WDeriv deriv) {
  if (k >= ctx.grid.levels()) throw OutOfDomain("time index beyond the horizon");
  const Point lo = cv.y0.point(k), hi = cv.y1.point(k);
  const double slack = 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(y.value()));
  if (separation(y, lo) < -slack || separation(hi, y) < -slack)
    throw OutOfDomain("point outside [y0(t), y1(t)] at level " + std::to_string(k));
  const auto& p = ctx.profiles;
  if (k == 0) return deriv == WDeriv::value ? p.F_at(y.value()) : p.Fp_at(y.value());
  const bool on_left = same_point(y, lo), on_right = same_point(y, hi);
  const double D = ctx.data.D, beta = ctx.data.beta, dt = ctx.grid.dt();
  if (deriv == WDeriv::d_y) {
    const auto parts = slope_parts(y, k, phi, trace, cv, ctx, false);
    double v = parts.init + parts.right + parts.left;
    if (on_right) v += 0.5 * phi.phi1[k];
    if (on_left) v += 0.5 * phi.phi2[k];
    return v;
  }
  const double s = ctx.grid.time(k);
  double v = initial_integral(p, p.F, y, s, D, -1.0);
  v += curve_integral(y, k, cv.y1, dt, D, [&](std::size_t j, double th, double, const KernelPair& kp) {
    return D * lerp_cell(phi.phi1, j, th) * kp.G();
  });
  v += curve_integral(y, k, cv.y0, dt, D, [&](std::size_t j, double th, double, const KernelPair& kp) {
    const double fv = ctx.data.f((static_cast<double>(j) + th) * dt);
    const double h = lerp_cell(trace.h, j, th), p2 = lerp_cell(phi.phi2, j, th);
    return (beta * beta * h / fv - D * beta * p2 / fv) * kp.G() - D * h * kp.N_y();
  });
  if (on_left) v += 0.5 * trace.h[k];
  return v;
}

Densities chi_map(const Densities& phi, const TraceFn& trace, const Boundaries& cv,
                  const VolterraContext& ctx) {
  return chi_map(phi, trace, cv, ctx, ctx.exec);
}

Densities chi_map(const Densities& phi, const TraceFn& trace, const Boundaries& cv,
                  const VolterraContext& ctx, ExecPolicy exec) {
  check_levels(phi.phi1, ctx, "phi1");
  check_levels(phi.phi2, ctx, "phi2");
  check_levels(trace.h, ctx, "h");
  check_levels(trace.hprime, ctx, "h'");
  const double D = ctx.data.D, beta = ctx.data.beta;
  const bool direct_form = ctx.form == ChiForm::direct;
  if (direct_form) {
    if (!(D < 2.0)) throw InvalidData("direct chi map needs D < 2");
    for (std::size_t k = 0; k < ctx.f.size(); ++k)
      if (!(2.0 * ctx.f[k] > D * beta)) throw InvalidData("direct chi map needs 2f > D beta");
  }
  const std::size_t L = ctx.grid.levels();
  Densities out{ctx.grid.zeros(), ctx.grid.zeros()};
  const auto& p = ctx.profiles;
  if (direct_form) {
    const double a2 = 2.0 * ctx.f[0] / (2.0 * ctx.f[0] - D * beta);
    out.phi1[0] = p.Fp.back() / (2.0 - D);
    out.phi2[0] = a2 * (-beta * beta * trace.h[0] / ctx.f[0] + 0.5 * p.Fp.front());
  } else {
    out.phi1[0] = p.Fp.back();
    out.phi2[0] = p.Fp.front();
  }

  auto level = [&](std::size_t k) {
    const auto r = slope_parts(cv.y1.point(k), k, phi, trace, cv, ctx, direct_form);
    const auto l = slope_parts(cv.y0.point(k), k, phi, trace, cv, ctx, direct_form);
    if (direct_form) {
      const double f = ctx.f[k];
      out.phi1[k] = 2.0 / (2.0 - D) * (r.init + r.right + r.left);
      out.phi2[k] = 2.0 * f / (2.0 * f - D * beta) *
                    (-beta * beta * trace.h[k] / f + l.init + l.right + l.left);
    } else {
      out.phi1[k] = 2.0 * (r.init + r.right + r.left);
      out.phi2[k] = 2.0 * (l.init + l.right + l.left);
    }
  };

  if (exec == ExecPolicy::serial) {
    for (std::size_t k = 1; k < L; ++k) level(k);
    return out;
  }
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 1; k < L; ++k) {
    try {
      level(k);
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return out;
}

double sigma_norm(const Densities& a) { return a.phi1.sup_norm() + a.phi2.sup_norm(); }

double sigma_distance(const Densities& a, const Densities& b) {
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t k = 0; k < a.phi1.size(); ++k) {
    m1 = std::max(m1, std::abs(a.phi1[k] - b.phi1[k]));
    m2 = std::max(m2, std::abs(a.phi2[k] - b.phi2[k]));
  }
  return m1 + m2;
}

PicardResult picard_solve(const TraceFn& trace, const VolterraContext& ctx, double tol,
                          std::size_t max_iter, const Densities* initial) {
  PicardResult res;
  res.phi = initial ? *initial : Densities{ctx.grid.zeros(), ctx.grid.zeros()};
  for (std::size_t it = 1; it <= max_iter; ++it) {
    const auto curves = assemble_boundaries(res.phi, trace, ctx);
    auto next = chi_map(res.phi, trace, curves, ctx);
    const double r = sigma_distance(next, res.phi);
    res.phi = std::move(next);
    res.iterations = it;
    res.final_residual = r;
    const double floor = 1e4 * std::numeric_limits<double>::epsilon() * std::max(1.0, sigma_norm(res.phi));
    if (!res.history.empty() && res.history.back() > floor && r > floor) {
      res.max_ratio = std::max(res.max_ratio, r / res.history.back());
      ++res.ratios_measured;
    }
    res.history.push_back(r);
    if (r <= tol) {
      res.converged = true;
      break;
    }
  }
  res.curves = assemble_boundaries(res.phi, trace, ctx);
  return res;
}

} // namespace fbp
