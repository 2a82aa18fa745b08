#include "fbp/transform_chain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fbp/errors.hpp"

namespace fbp {

std::vector<double> FieldFunction::coords(std::size_t k) const {
  std::vector<double> y(nodes[k]);
  const double shift = drift * time(k);
  for (auto& v : y) v += shift;
  return y;
}

std::vector<double> FieldFunction::vals(std::size_t k) const {
  std::vector<double> v(values[k]);
  for (auto& x : v) x += bias;
  return v;
}

double FieldFunction::at(std::size_t k, double y) const {
  const auto& n = nodes[k];
  const double yy = y - drift * time(k);
  if (yy < n.front() || yy > n.back()) throw OutOfDomain("field evaluated outside its slice");
  auto it = std::upper_bound(n.begin(), n.end(), yy);
  std::size_t j = it == n.end() ? n.size() - 2 : static_cast<std::size_t>(it - n.begin()) - 1;
  j = std::min(j, n.size() - 2);
  const double th = (yy - n[j]) / (n[j + 1] - n[j]);
  return values[k][j] + th * (values[k][j + 1] - values[k][j]) + bias;
}

FieldFunction FieldFunction::flattened() const {
  FieldFunction f;
  f.t0 = t0;
  f.dt = dt;
  for (std::size_t k = 0; k < steps(); ++k) {
    f.nodes.push_back(coords(k));
    f.values.push_back(vals(k));
  }
  return f;
}

void FieldFunction::validate() const {
  if (!(dt > 0.0) || !std::isfinite(t0)) throw InvalidField("field time grid is invalid");
  if (nodes.empty() || nodes.size() != values.size()) throw InvalidField("field slices are inconsistent");
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto& n = nodes[k];
    const auto& v = values[k];
    if (n.size() < 2 || n.size() != v.size())
      throw InvalidField("slice " + std::to_string(k) + " has mismatched or too few nodes");
    for (std::size_t i = 0; i < n.size(); ++i) {
      if (!std::isfinite(n[i]) || !std::isfinite(v[i]))
        throw InvalidField("non-finite entry in slice " + std::to_string(k));
      if (i > 0 && !(n[i] > n[i - 1]))
        throw InvalidField("nodes not increasing in slice " + std::to_string(k));
    }
  }
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> y(n + 1);
  for (std::size_t i = 0; i <= n; ++i) y[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
  y[n] = b;
  return y;
}

namespace {

GridFunction trapezoid_from(double t0, double dt, double start, const std::vector<double>& rate) {
  std::vector<double> out(rate.size());
  out[0] = start;
  for (std::size_t k = 1; k < rate.size(); ++k) out[k] = out[k - 1] + 0.5 * dt * (rate[k - 1] + rate[k]);
  return GridFunction(t0, dt, std::move(out));
}

std::vector<double> time_nodes(const FieldFunction& f) {
  std::vector<double> t(f.steps());
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = f.time(k);
  return t;
}

} // namespace

HodographResult hodograph_forward(const FieldFunction& u, double D, double C1) {
  u.validate();
  if (u.steps() < 2) throw InvalidField("hodograph needs at least two time levels");
  HodographResult r;
  r.v.t0 = u.t0;
  r.v.dt = u.dt;
  std::vector<double> q(u.steps());
  std::vector<std::vector<double>> offsets(u.steps());
  for (std::size_t k = 0; k < u.steps(); ++k) {
    const auto x = u.coords(k);
    const auto val = u.vals(k);
    std::vector<double> inv(val.size());
    for (std::size_t i = 0; i < val.size(); ++i) {
      if (!(val[i] > 0.0)) throw InvalidField("hodograph requires u > 0");
      inv[i] = 1.0 / val[i];
    }
    offsets[k] = cumulative_nodes(x, inv);
    const auto ux = node_derivatives(x, val);
    q[k] = val[0] - D * ux[0];
    r.v.values.push_back(val);
  }
  r.z0 = trapezoid_from(u.t0, u.dt, C1, q);
  std::vector<double> z1(u.steps());
  for (std::size_t k = 0; k < u.steps(); ++k) {
    auto& z = offsets[k];
    for (auto& e : z) e += r.z0[k];
    z1[k] = z.back();
    r.v.nodes.push_back(std::move(z));
  }
  r.z1 = GridFunction(u.t0, u.dt, std::move(z1));
  return r;
}

HodographInverse hodograph_inverse(const FieldFunction& v) {
  v.validate();
  HodographInverse r;
  r.u.t0 = v.t0;
  r.u.dt = v.dt;
  std::vector<double> s(v.steps());
  for (std::size_t k = 0; k < v.steps(); ++k) {
    const auto z = v.coords(k);
    const auto val = v.vals(k);
    for (double e : val)
      if (!(e > 0.0)) throw InvalidField("hodograph inverse requires v > 0");
    auto x = cumulative_nodes(z, val);
    x[0] = 0.0;
    s[k] = x.back();
    r.u.nodes.push_back(std::move(x));
    r.u.values.push_back(val);
  }
  r.s = GridFunction(v.t0, v.dt, std::move(s));
  return r;
}

ShiftResult galilean_shift(const FieldFunction& field, double beta, Direction dir) {
  ShiftResult r;
  r.field = field;
  const double sgn = dir == Direction::forward ? 1.0 : -1.0;
  r.field.drift = field.drift - sgn * 2.0 * beta;
  r.field.bias = field.bias - sgn * beta;
  std::vector<double> lo(field.steps()), hi(field.steps());
  for (std::size_t k = 0; k < field.steps(); ++k) {
    lo[k] = r.field.lo(k);
    hi[k] = r.field.hi(k);
  }
  r.lo = GridFunction(field.t0, field.dt, std::move(lo));
  r.hi = GridFunction(field.t0, field.dt, std::move(hi));
  return r;
}

HopfColeForward hopf_cole_forward(const FieldFunction& V, double D, const GridFunction* C) {
  V.validate();
  HopfColeForward r;
  const std::size_t K = V.steps();
  r.state.eta.t0 = r.w.t0 = V.t0;
  r.state.eta.dt = r.w.dt = V.dt;
  if (C) {
    if (C->size() != K) throw InvalidField("C must share the field time grid");
    r.state.C = *C;
    for (std::size_t k = 0; k < K; ++k)
      if (!(r.state.C[k] > 0.0)) throw HorizonExceeded("C(t) is not positive", k);
  } else {
    if (K < 3) throw InvalidField("computing C needs at least three time levels");
    std::vector<double> y1(K), rate(K);
    for (std::size_t k = 0; k < K; ++k) y1[k] = V.hi(k);
    const auto y1p = node_derivatives(time_nodes(V), y1);
    for (std::size_t k = 0; k < K; ++k) {
      const auto y = V.coords(k);
      const auto val = V.vals(k);
      const double Vy = node_derivatives(y, val).back();
      const double Vb = val.back();
      rate[k] = -(Vy - Vb * Vb / D + Vb * y1p[k] / D);
    }
    auto logC = trapezoid_from(V.t0, V.dt, 0.0, rate);
    for (auto& e : logC.values) e = std::exp(e);
    r.state.C = logC;
  }
  for (std::size_t k = 0; k < K; ++k) {
    const auto y = V.coords(k);
    const auto val = V.vals(k);
    auto eta = cumulative_nodes_from_right(y, val);
    std::vector<double> w(val.size());
    for (std::size_t i = 0; i < val.size(); ++i) {
      eta[i] = std::exp(eta[i] / D);
      w[i] = r.state.C[k] * val[i] * eta[i];
    }
    r.w.nodes.push_back(y);
    r.w.values.push_back(std::move(w));
    r.state.eta.nodes.push_back(y);
    r.state.eta.values.push_back(std::move(eta));
  }
  return r;
}

FieldFunction hopf_cole_inverse(const FieldFunction& w, const GridFunction& C, double D) {
  w.validate();
  if (C.size() != w.steps()) throw InvalidField("C must share the field time grid");
  FieldFunction V;
  V.t0 = w.t0;
  V.dt = w.dt;
  for (std::size_t k = 0; k < w.steps(); ++k) {
    const auto y = w.coords(k);
    const auto val = w.vals(k);
    const auto cum = cumulative_nodes_from_right(y, val);
    std::vector<double> out(val.size());
    for (std::size_t i = 0; i < val.size(); ++i) {
      const double den = C[k] + cum[i] / D;
      if (!(den > 0.0)) throw HorizonExceeded("Hopf-Cole denominator is not positive", k);
      out[i] = val[i] / den;
    }
    V.nodes.push_back(y);
    V.values.push_back(std::move(out));
  }
  return V;
}

GridFunction hopf_cole_C_from_flux(const GridFunction& phi1) {
  std::vector<double> rate(phi1.values);
  for (auto& e : rate) e = -e;
  return trapezoid_from(phi1.t0, phi1.dt, 1.0, rate);
}

FieldFunction residual_field(const FieldFunction& f,
                             const std::function<double(const LocalDerivs&)>& op) {
  f.validate();
  const std::size_t K = f.steps();
  if (K < 3) throw InvalidField("residual needs at least three time levels");
  const std::size_t m = f.nodes[0].size();
  for (const auto& n : f.nodes)
    if (n.size() != m || m < 3) throw InvalidField("residual needs a fixed node count of at least three");
  FieldFunction r;
  r.t0 = f.time(1);
  r.dt = f.dt;
  for (std::size_t k = 1; k + 1 < K; ++k) {
    const auto y = f.coords(k), ym = f.coords(k - 1), yp = f.coords(k + 1);
    const auto v = f.vals(k), vm = f.vals(k - 1), vp = f.vals(k + 1);
    std::vector<double> nodes, res;
    for (std::size_t i = 1; i + 1 < m; ++i) {
      const double h0 = y[i] - y[i - 1], h1 = y[i + 1] - y[i];
      const double vy = (-h1 / (h0 * (h0 + h1))) * v[i - 1] + ((h1 - h0) / (h0 * h1)) * v[i] +
                        (h0 / (h1 * (h0 + h1))) * v[i + 1];
      const double vyy = 2.0 * (h0 * v[i + 1] - (h0 + h1) * v[i] + h1 * v[i - 1]) / (h0 * h1 * (h0 + h1));
      const double dvdt = (vp[i] - vm[i]) / (2.0 * f.dt);
      const double dydt = (yp[i] - ym[i]) / (2.0 * f.dt);
      nodes.push_back(y[i]);
      res.push_back(op({v[i], dvdt - vy * dydt, vy, vyy}));
    }
    r.nodes.push_back(std::move(nodes));
    r.values.push_back(std::move(res));
  }
  return r;
}

double sup_abs(const FieldFunction& f) {
  double m = 0.0;
  for (std::size_t k = 0; k < f.steps(); ++k)
    for (std::size_t i = 0; i < f.values[k].size(); ++i) m = std::max(m, std::abs(f.value(k, i)));
  return m;
}

double heat_residual_sup(const FieldFunction& w, double D) {
  return sup_abs(residual_field(w, [D](const LocalDerivs& d) { return d.t - D * d.yy; }));
}

double burgers_residual_sup(const FieldFunction& V, double D) {
  return sup_abs(residual_field(V, [D](const LocalDerivs& d) { return d.t - D * d.yy + 2.0 * d.value * d.y; }));
}

double calor_residual_sup(const FieldFunction& u, double D) {
  return sup_abs(residual_field(
      u, [D](const LocalDerivs& d) { return d.t - d.value * d.value * (D * d.yy - d.y); }));
}

double node_distance(const FieldFunction& a, const FieldFunction& b) {
  if (a.steps() != b.steps()) throw InvalidField("fields have different time grids");
  double m = 0.0;
  for (std::size_t k = 0; k < a.steps(); ++k) {
    if (a.nodes[k].size() != b.nodes[k].size()) throw InvalidField("fields have different node counts");
    for (std::size_t i = 0; i < a.nodes[k].size(); ++i)
      m = std::max(m, std::abs(a.coord(k, i) - b.coord(k, i)) + std::abs(a.value(k, i) - b.value(k, i)));
  }
  return m;
}

} // namespace fbp
