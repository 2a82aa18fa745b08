#include "fbp/outer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "fbp/errors.hpp"

namespace fbp {

PiReport pi_membership(const TraceFn& trace, const PiSpec& pi) {
  PiReport r;
  for (std::size_t k = 0; k < trace.h.size(); ++k) {
    const double h = trace.h[k], hp = trace.hprime[k];
    if (h < pi.H) r.violations.push_back({"lower", k, h, pi.H});
    if (std::abs(h) > pi.R) r.violations.push_back({"sup", k, std::abs(h), pi.R});
    if (std::abs(hp) > pi.S) r.violations.push_back({"slope", k, std::abs(hp), pi.S});
  }
  r.member = r.violations.empty();
  return r;
}

TraceFn initial_trace(const VolterraContext& ctx) {
  const double E = ctx.profiles.E_C1, beta = ctx.data.beta;
  TraceFn t{ctx.f, ctx.fprime};
  for (auto& v : t.h.values) v = (v - beta) * E;
  for (auto& v : t.hprime.values) v *= E;
  return t;
}

namespace {

GridFunction trapezoid(const std::vector<double>& rate, double dt) {
  std::vector<double> out(rate.size(), 0.0);
  for (std::size_t k = 1; k < rate.size(); ++k) out[k] = out[k - 1] + 0.5 * dt * (rate[k - 1] + rate[k]);
  return GridFunction(0.0, dt, std::move(out));
}

} // namespace

ZResult Z_map(const TraceFn& trace, const VolterraContext& ctx, double picard_tol,
              std::size_t max_iter, const Densities* warm) {
  for (std::size_t k = 0; k < trace.h.size(); ++k)
    if (!(trace.h[k] >= 0.0)) throw InvalidTrace("h must be nonnegative (node " + std::to_string(k) + ")");
  ZResult z;
  z.inner = picard_solve(trace, ctx, picard_tol, max_iter, warm);
  const double D = ctx.data.D, beta = ctx.data.beta, dt = ctx.grid.dt();
  const std::size_t L = ctx.grid.levels();
  const auto& phi = z.inner.phi;
  std::vector<double> mrate(L), c(L);
  for (std::size_t k = 0; k < L; ++k) {
    const double f = ctx.f[k];
    mrate[k] = D * phi.phi1[k] + beta * beta * trace.h[k] / f - D * beta * phi.phi2[k] / f;
  }
  z.dC = cumulative_integral(phi.phi1);
  for (auto& v : z.dC.values) v = -v;
  z.dM = trapezoid(mrate, dt);
  z.E = z.dC;
  z.Z = trace;
  for (std::size_t k = 0; k < L; ++k) {
    const double f = ctx.f[k], E = ctx.profiles.E_C1 + z.dC[k] + z.dM[k] / D;
    z.E[k] = E;
    z.Z.h[k] = (f - beta) * E;
    const double Ep = beta / f * (beta * trace.h[k] / D - phi.phi2[k]);
    z.Z.hprime[k] = ctx.fprime[k] * E + (f - beta) * Ep;
  }
  return z;
}

FieldFunction FieldSamples::as_field() const {
  FieldFunction f;
  f.t0 = 0.0;
  f.dt = dt;
  for (std::size_t k = 0; k < y.size(); ++k) {
    std::vector<double> n(y[k].size());
    for (std::size_t i = 0; i < n.size(); ++i) n[i] = y[k][i].value();
    f.nodes.push_back(std::move(n));
    f.values.push_back(w[k]);
  }
  return f;
}

FieldSamples sample_field(const SolutionBundle& b, const VolterraContext& ctx, std::size_t n_space) {
  const std::size_t L = ctx.grid.levels();
  FieldSamples fs;
  fs.dt = ctx.grid.dt();
  fs.y.resize(L);
  fs.w.resize(L);
  for (std::size_t k = 0; k < L; ++k) {
    const Point lo = b.curves.y0.point(k), hi = b.curves.y1.point(k);
    const double len = separation(hi, lo);
    fs.y[k].resize(n_space + 1);
    for (std::size_t i = 0; i < n_space; ++i)
      fs.y[k][i] = {lo.origin, lo.offset + len * static_cast<double>(i) / static_cast<double>(n_space)};
    fs.y[k][n_space] = hi;
    fs.w[k].assign(n_space + 1, 0.0);
  }
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic) if (ctx.exec == ExecPolicy::parallel)
  for (std::size_t k = 0; k < L; ++k) {
    try {
      auto& w = fs.w[k];
      for (std::size_t i = 1; i < n_space; ++i) w[i] = eval_w(fs.y[k][i], k, b.phi, b.h, b.curves, ctx);
      // Dirichlet data are known exactly on both boundaries
      w.front() = b.h.h[k];
      w.back() = 0.0;
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return fs;
}

SolutionBundle solve_outer(const VolterraContext& ctx, const OuterOptions& opts) {
  if (!(opts.relaxation > 0.0 && opts.relaxation <= 1.0))
    throw InvalidData("relaxation must lie in (0, 1]");
  SolutionBundle b;
  TraceFn h = initial_trace(ctx);
  std::optional<Densities> warm;
  for (std::size_t it = 1; it <= opts.max_outer; ++it) {
    auto z = Z_map(h, ctx, opts.picard_tol, opts.max_iter, warm ? &*warm : nullptr);
    b.outer_iterations = it;
    b.inner_iterations.push_back(z.inner.iterations);
    b.inner_histories.push_back(z.inner.history);
    b.max_inner_ratio = std::max(b.max_inner_ratio, z.inner.max_ratio);
    b.final_inner_residual = z.inner.final_residual;
    b.h = h;
    b.phi = z.inner.phi;
    b.curves = z.inner.curves;
    b.dC = z.dC;
    b.dM = z.dM;
    b.E = z.E;
    if (opts.pi) b.pi_reports.push_back(pi_membership(h, *opts.pi));
    if (!z.inner.converged) {
      b.failure = "inner iteration did not converge";
      return b;
    }
    double res = 0.0;
    for (std::size_t k = 0; k < h.h.size(); ++k) res = std::max(res, std::abs(z.Z.h[k] - h.h[k]));
    b.outer_history.push_back(res);
    if (res <= opts.outer_tol) {
      b.converged = true;
      break;
    }
    const double th = opts.relaxation;
    for (std::size_t k = 0; k < h.h.size(); ++k) {
      h.h[k] = (1.0 - th) * h.h[k] + th * z.Z.h[k];
      h.hprime[k] = (1.0 - th) * h.hprime[k] + th * z.Z.hprime[k];
    }
    warm = z.inner.phi;
  }
  if (!b.converged) {
    b.failure = "outer iteration did not converge";
    return b;
  }
  if (opts.field_nodes > 0) b.field = sample_field(b, ctx, opts.field_nodes);
  return b;
}

} // namespace fbp
