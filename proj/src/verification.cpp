#include "fbp/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fbp/errors.hpp"
#include "fbp/kernels.hpp"
#include "fbp/transform_chain.hpp"

namespace fbp {

const NormEntry* ResidualReport::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

double ResidualReport::sup(const std::string& name) const {
  const auto* e = find(name);
  if (!e) throw std::out_of_range("no residual named " + name);
  return e->sup;
}

void ResidualReport::add(std::string name, const std::vector<double>& r) {
  NormEntry e;
  e.name = std::move(name);
  double sq = 0.0;
  for (double v : r) {
    if (!std::isfinite(v)) {
      e.sup = std::numeric_limits<double>::infinity();
      notes.push_back(e.name + ": non-finite entry");
      continue;
    }
    e.sup = std::max(e.sup, std::abs(v));
    sq += v * v;
  }
  e.count = r.size();
  e.rms = r.empty() ? 0.0 : std::sqrt(sq / static_cast<double>(r.size()));
  entries.push_back(std::move(e));
}

nlohmann::json to_json(const ResidualReport& r) {
  nlohmann::json j;
  j["partial"] = r.partial;
  j["notes"] = r.notes;
  j["n_time"] = r.n_time;
  j["n_space"] = r.n_space;
  j["sigma"] = r.sigma;
  nlohmann::json e = nlohmann::json::object();
  for (const auto& x : r.entries) {
    const auto num = [](double v) -> nlohmann::json { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json("inf"); };
    e[x.name] = {{"sup", num(x.sup)}, {"rms", num(x.rms)}, {"count", x.count}};
  }
  j["residuals"] = e;
  return j;
}

namespace {

std::vector<double> flatten(const FieldFunction& f) {
  std::vector<double> out;
  for (const auto& row : f.values) out.insert(out.end(), row.begin(), row.end());
  return out;
}

// int_0^{t_k} fn(j, theta, s, kernels) dtau along a piecewise-linear curve, target P
template <class Fn>
double along_curve(const Point& P, std::size_t k, const Curve& c, double dt, double D, const Fn& fn) {
  const double t = static_cast<double>(k) * dt;
  double total = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double o0 = c.offset[j], o1 = c.offset[j + 1];
    const double span = static_cast<double>(k - j);
    auto pos = [&](double s) { return o0 + (span - s / dt) * (o1 - o0); };
    auto dist = [&](double s) {
      const double off = pos(s);
      return std::array<double, 2>{(P.origin - c.origin) + (P.offset - off), (P.origin + c.origin) + (P.offset + off)};
    };
    auto f = [&](double, double s) {
      const auto d = dist(s);
      return fn(j, span - s / dt, s, KernelPair::at(d[0], d[1], s, D));
    };
    total += quad::usub_adaptive(t, std::sqrt((span - 1.0) * dt), std::sqrt(span * dt), f, dist, D);
  }
  return total;
}

double lerp(const std::vector<double>& v, std::size_t j, double th) { return v[j] + th * (v[j + 1] - v[j]); }

} // namespace

ResidualReport residual_suite(const SolutionBundle& b, const ParametricSolution& p, const VolterraContext& ctx) {
  ResidualReport rep;
  rep.n_time = ctx.grid.n;
  rep.n_space = b.field.empty() ? 0 : b.field.y.front().size() - 1;
  rep.sigma = ctx.grid.sigma;
  const double D = ctx.data.D, beta = ctx.data.beta;
  const std::size_t L = ctx.grid.levels();

  std::vector<double> r0(L), r1(L);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < L; ++k) {
    r0[k] = eval_w(b.curves.y0.point(k), k, b.phi, b.h, b.curves, ctx) - b.h.h[k];
    r1[k] = eval_w(b.curves.y1.point(k), k, b.phi, b.h, b.curves, ctx);
  }

  if (b.field.empty() || L < 3 || rep.n_space < 2) {
    rep.partial = true;
    rep.notes.push_back("insufficient interior nodes for field residuals");
  } else {
    // boundary columns hold the representation's own limits rather than the Dirichlet data
    auto fs = b.field;
    for (std::size_t k = 1; k < L; ++k) {
      fs.w[k].front() = b.h.h[k] + r0[k];
      fs.w[k].back() = r1[k];
    }
    const auto w = fs.as_field();
    double wmax = 0.0;
    for (const auto& row : fs.w)
      for (double v : row) wmax = std::max(wmax, std::abs(v));
    const double floor = std::numeric_limits<double>::epsilon() * std::max(wmax, 1.0) / ctx.grid.dt();
    if (floor > 1e-3) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "time step below the rounding resolution of the field: eps |w| / dt = %.3e", floor);
      rep.notes.push_back(buf);
    }
    const auto heat = residual_field(w, [D](const LocalDerivs& d) { return d.t - D * d.yy; });
    rep.add("heat_w", flatten(heat));
    FieldFunction late = heat;
    const std::size_t skip = std::min(late.values.size(), (L - 1) / 4);
    late.values.erase(late.values.begin(), late.values.begin() + static_cast<std::ptrdiff_t>(skip));
    rep.add("heat_w_late", flatten(late));
    GridFunction C = b.dC;
    for (auto& v : C.values) v += 1.0;
    const auto V = hopf_cole_inverse(w, C, D);
    rep.add("burgers_V", flatten(residual_field(V, [D](const LocalDerivs& d) { return d.t - D * d.yy + 2.0 * d.value * d.y; })));
    rep.add("calor_u", flatten(residual_field(p.as_field(), [D](const LocalDerivs& d) {
              return d.t - d.value * d.value * (D * d.yy - d.y);
            })));
  }

  rep.add("dirichlet_y0", r0);
  rep.add("dirichlet_y1", r1);

  std::vector<double> uf(L), us(L), st(L), tr(L), mass(L);
  for (std::size_t k = 0; k < L; ++k) {
    uf[k] = p.u[k].front() - ctx.f[k];
    us[k] = p.u[k].back() - beta;
    st[k] = D * p.ux_front[k] - p.u[k].back() + p.sdot[k];
    tr[k] = b.h.h[k] - (ctx.f[k] - beta) * b.E[k];
    double m = 0.0;
    const auto& y = b.field.y[k];
    for (std::size_t i = 1; i < y.size(); ++i) m += 0.5 * separation(y[i], y[i - 1]) * (b.field.w[k][i] + b.field.w[k][i - 1]);
    const double balance = ctx.profiles.M0 + b.dM[k];
    mass[k] = (m - balance) / std::max(std::abs(balance), 1e-300);
  }
  rep.add("u_left_minus_f", uf);
  rep.add("u_front_minus_beta", us);
  rep.add("stefan", st);
  rep.add("trace_fixed_point", tr);
  rep.add("mass_balance_rel", mass);

  std::vector<double> sampled(L);
  for (std::size_t k = 0; k < L; ++k) sampled[k] = p.ux_front_sampled[k] - p.ux_front[k];
  rep.add("front_slope_sampled_minus_density", sampled);

  const auto ibp = ibp_equivalence_check(b, ctx);
  std::vector<double> d(L);
  for (std::size_t k = 0; k < L; ++k) d[k] = ibp.direct[k] - ibp.by_parts[k];
  rep.add("ibp_equivalence", d);
  return rep;
}

Manufactured mms_zero() {
  auto z = [](double, double) { return 0.0; };
  return {"zero", z, z, z, z};
}

Manufactured mms_linear(double a, double b) {
  return {"linear", [a, b](double y, double) { return a + b * y; }, [b](double, double) { return b; },
          [](double, double) { return 0.0; }, [](double, double) { return 0.0; }};
}

Manufactured mms_quadratic(double D) {
  return {"quadratic", [D](double y, double t) { return 2.0 * D * t + y * y; }, [](double y, double) { return 2.0 * y; },
          [D](double, double) { return 2.0 * D; }, [](double, double) { return 2.0; }};
}

Manufactured mms_combine(double a, const Manufactured& m1, double b, const Manufactured& m2) {
  auto mix = [a, b](std::function<double(double, double)> f, std::function<double(double, double)> g) {
    return [a, b, f, g](double y, double t) { return a * f(y, t) + b * g(y, t); };
  };
  return {m1.name + "+" + m2.name, mix(m1.w, m2.w), mix(m1.w_y, m2.w_y), mix(m1.w_t, m2.w_t), mix(m1.w_yy, m2.w_yy)};
}

PrescribedCurve straight_curve(double y_start, double velocity) {
  return {[=](double t) { return y_start + velocity * t; }, [=](double) { return velocity; }};
}

MmsResult mms_representation_check(const Manufactured& m, const PrescribedCurve& y0, const PrescribedCurve& y1,
                                   const MmsSettings& st) {
  if (!(st.D > 0.0) || !(st.sigma > 0.0) || st.n < 2) throw InvalidData("bad MMS settings");
  const double D = st.D, dt = st.sigma / static_cast<double>(st.n);
  for (double t : {0.0, 0.5 * st.sigma, st.sigma})
    for (double a : {0.0, 0.5, 1.0}) {
      const double y = (1 - a) * y0.y(t) + a * y1.y(t);
      const double r = m.w_t(y, t) - D * m.w_yy(y, t);
      if (std::abs(r) > 1e-10 * (1.0 + std::abs(m.w_t(y, t))))
        throw InvalidField("invalid manufactured solution: " + m.name + " does not solve the heat equation");
    }

  const std::size_t L = st.n + 1;
  auto sample_curve = [&](const PrescribedCurve& c) {
    Curve out;
    out.origin = c.y(0.0);
    out.offset = GridFunction::sample(0.0, dt, L, [&](double t) { return c.y(t) - out.origin; });
    return out;
  };
  const Curve c0 = sample_curve(y0), c1 = sample_curve(y1);
  std::vector<double> w0(L), w1(L), g0(L), g1(L), v0(L), v1(L);
  for (std::size_t j = 0; j < L; ++j) {
    const double t = static_cast<double>(j) * dt;
    w0[j] = m.w(c0[j], t);
    w1[j] = m.w(c1[j], t);
    g0[j] = m.w_y(c0[j], t);
    g1[j] = m.w_y(c1[j], t);
    v0[j] = y0.dy(t);
    v1[j] = y1.dy(t);
  }
  const bool src = st.layer == DoubleLayer::source_derivative;

  MmsResult res;
  for (double tf : st.time_fractions) {
    const auto k = static_cast<std::size_t>(std::llround(tf * static_cast<double>(st.n)));
    if (k == 0 || k > st.n) continue;
    const double t = static_cast<double>(k) * dt;
    for (double a : st.space_fractions) {
      const double ylo = c0[k], yhi = c1[k];
      const Point P{ylo, a * (yhi - ylo)};
      const double y = P.value();
      using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
      double v = GK::integrate(
          [&](double xi) { return KernelPair::at(y - xi, y + xi, t, D).G() * m.w(xi, 0.0); }, c0[0], c1[0], 20, 1e-14);
      // right boundary: + D phi1 G - D w G_xi + G w y'
      v += along_curve(P, k, c1, dt, D, [&](std::size_t j, double th, double, const KernelPair& kp) {
        const double dl = src ? kp.G_xi() : kp.G_y();
        return D * lerp(g1, j, th) * kp.G() - D * lerp(w1, j, th) * dl + kp.G() * lerp(w1, j, th) * lerp(v1, j, th);
      });
      v -= along_curve(P, k, c0, dt, D, [&](std::size_t j, double th, double, const KernelPair& kp) {
        const double dl = src ? kp.G_xi() : kp.G_y();
        return D * lerp(g0, j, th) * kp.G() - D * lerp(w0, j, th) * dl + kp.G() * lerp(w0, j, th) * lerp(v0, j, th);
      });
      const double ex = m.w(y, t);
      res.samples.push_back({t, y, ex, v});
      res.error = std::max(res.error, std::abs(v - ex));
    }
  }
  return res;
}

JumpResult jump_relation_check(const GridFunction& psi, const GridFunction& curve, Side side, double D, double h) {
  psi.validate();
  curve.validate();
  if (psi.size() != curve.size() || psi.dt != curve.dt) throw InvalidData("density and curve must share a grid");
  if (!(D > 0.0)) throw InvalidData("D must be positive");
  const std::size_t k = psi.size() - 1;
  const double dt = psi.dt, t = static_cast<double>(k) * dt;
  if (h <= 0.0) h = 1e-3 * std::sqrt(D * t);
  const Curve c{curve[0], [&] {
                  GridFunction o = curve;
                  for (auto& v : o.values) v -= curve[0];
                  return o;
                }()};
  const double sgn = side == Side::above ? 1.0 : -1.0;

  // free-space kernel: the image part of KernelPair is ignored
  auto single_layer_dy = [&](double eps) {
    const Point P{c.origin, c.offset[k] + sgn * eps};
    return along_curve(P, k, c, dt, D, [&](std::size_t j, double th, double, const KernelPair& kp) {
      return lerp(psi.values, j, th) * kp.minus.kr;
    });
  };
  JumpResult r;
  r.eps = {h, 2.0 * h, 4.0 * h};
  for (std::size_t i = 0; i < 3; ++i) r.values[i] = single_layer_dy(r.eps[i]);
  r.limit = (8.0 * r.values[0] - 6.0 * r.values[1] + r.values[2]) / 3.0;
  r.direct = single_layer_dy(0.0);
  r.predicted = r.direct - sgn * psi[k] / (2.0 * D);
  r.mismatch = std::abs(r.limit - r.predicted);
  const double d1 = std::abs(r.values[0] - r.values[1]), d2 = std::abs(r.values[1] - r.values[2]);
  r.diverged = !(d1 <= 0.75 * d2 + 1e-14 * (1.0 + std::abs(r.limit)));
  return r;
}

IbpResult ibp_equivalence_check(const SolutionBundle& b, const VolterraContext& ctx) {
  const double D = ctx.data.D, dt = ctx.grid.dt();
  const std::size_t L = ctx.grid.levels();
  const auto& c0 = b.curves.y0;
  const auto& h = b.h.h.values;
  const auto& hp = b.h.hprime.values;
  IbpResult r;
  r.direct.assign(L, 0.0);
  r.by_parts.assign(L, 0.0);
  std::vector<double> scale(L, 0.0);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 1; k < L; ++k) {
    const Point P = b.curves.y1.point(k);
    const double t = static_cast<double>(k) * dt;
    r.direct[k] = -along_curve(P, k, c0, dt, D, [&](std::size_t j, double th, double, const KernelPair& kp) {
      return lerp(hp, j, th) * kp.N();
    });
    const auto k0 = KernelPair::at(separation(P, c0.point(0)), P.value() + c0[0], t, D);
    const double corner = h[0] * k0.N();
    const double integral = along_curve(P, k, c0, dt, D, [&](std::size_t j, double th, double, const KernelPair& kp) {
      const double slope = (c0.offset[j + 1] - c0.offset[j]) / dt;
      return lerp(h, j, th) * (kp.G_y() * slope + D * kp.N_yy());
    });
    r.by_parts[k] = corner - integral;
    scale[k] = std::abs(r.direct[k]) + std::abs(corner);
  }
  double smax = 0.0;
  for (std::size_t k = 0; k < L; ++k) {
    r.max_abs = std::max(r.max_abs, std::abs(r.direct[k] - r.by_parts[k]));
    smax = std::max(smax, scale[k]);
  }
  r.max_rel = smax > 0.0 ? r.max_abs / smax : 0.0;
  return r;
}

} // namespace fbp
