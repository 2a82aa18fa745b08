#pragma once

#include <cmath>
#include <algorithm>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

namespace fbp {

enum class Interp { piecewise_linear, monotone_cubic };

/// Scalar function of time sampled on a uniform grid.
struct GridFunction {
  double t0 = 0.0;
  double dt = 1.0;
  std::vector<double> values;
  Interp interp = Interp::piecewise_linear;

  GridFunction() = default;
  GridFunction(double t0_, double dt_, std::vector<double> v, Interp i = Interp::piecewise_linear);
  static GridFunction constant(double t0, double dt, std::size_t n, double c);
  template <class F>
  static GridFunction sample(double t0, double dt, std::size_t n, F&& f) {
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = f(t0 + dt * static_cast<double>(k));
    return GridFunction(t0, dt, std::move(v));
  }

  std::size_t size() const { return values.size(); }
  double time(std::size_t k) const { return t0 + dt * static_cast<double>(k); }
  double t_end() const { return time(values.size() - 1); }
  double operator[](std::size_t k) const { return values[k]; }
  double& operator[](std::size_t k) { return values[k]; }
  double at(double t) const;
  double derivative_at(double t) const;
  double sup_norm() const;
  void validate() const;
};

class NumericalFailure : public std::runtime_error {
public:
  NumericalFailure(const std::string& what, double where)
      : std::runtime_error(what + " at t=" + std::to_string(where)), location(where) {}
  double location;
};

enum class Singularity { bounded, inverse_sqrt };

double integrate_smooth(const GridFunction& g, double a, double b);
double integrate_smooth(const std::function<double(double)>& f, double a, double b, double h);

/// Product integration of the piecewise-linear interpolant against (t_k - tau)^(-1/2).
double integrate_abel(const GridFunction& g, std::size_t t_index);

/// Weights w_j with sum_j w_j g_j = integrate_abel(g, k) for any samples g.
std::vector<double> abel_weights(double dt, std::size_t t_index);

double integrate_volterra_kernel(const GridFunction& g,
                                 const std::function<double(double, double)>& ker,
                                 Singularity cls, std::size_t t_index);

GridFunction cumulative_integral(const GridFunction& g);

/// Cumulative integral over sorted nodes with a fourth-order end-corrected trapezoid rule.
std::vector<double> cumulative_nodes(const std::vector<double>& x, const std::vector<double>& f);
/// Same, accumulated from the right end: out[i] = int_{x_i}^{x_n} f.
std::vector<double> cumulative_nodes_from_right(const std::vector<double>& x,
                                                const std::vector<double>& f);

/// Second-order nodal derivative estimates on sorted nonuniform nodes.
std::vector<double> node_derivatives(const std::vector<double>& x, const std::vector<double>& f);

/// int_lo^hi (p + q r) k(r, s) dr for the heat Gaussian k, using erf closed forms.
double gauss_linear_segment(double lo, double hi, double p, double q, double s, double D);
/// 0.5 * (erf(b) - erf(a)) computed without cancellation in the tails.
double half_erf_diff(double a, double b);

namespace quad {

using GL = boost::math::quadrature::gauss<double, 8>;

/// Gauss-Legendre in u over [u_lo, u_hi] for int f(tau) dtau with t - tau = u^2.
/// f receives (tau, s) where s = u^2 = t - tau.
template <class F>
double usub_segment(double t, double u_lo, double u_hi, const F& f) {
  const double c = 0.5 * (u_hi + u_lo);
  const double r = 0.5 * (u_hi - u_lo);
  const auto& x = GL::abscissa();
  const auto& w = GL::weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (int sgn : {-1, 1}) {
      const double u = c + sgn * r * x[i];
      const double s = u * u;
      acc += w[i] * 2.0 * u * f(t - s, s);
    }
  }
  return acc * r;
}

/// Exponent d^2 / (4 D s) of a Gaussian at signed distance d and lag s.
inline double gauss_exponent(double d, double s, double D) {
  if (d == 0.0) return 0.0;
  if (!(s > 0.0)) return std::numeric_limits<double>::infinity();
  return d * d / (4.0 * D * s);
}

/// Adaptive u-substituted Gauss-Legendre for heat-kernel integrands. dist(s) returns the signed
/// separations (std::array<double, N>) that drive the kernels at lag s; they must be affine in s.
/// Panels where every Gaussian underflows are dropped; panels where an exponent varies by more
/// than a few units are bisected.
template <class F, class Dist>
double usub_adaptive(double t, double u_lo, double u_hi, const F& f, const Dist& dist, double D,
                     int depth = 0) {
  const double s_lo = u_lo * u_lo, s_hi = u_hi * u_hi;
  const auto da = dist(s_lo);
  const auto db = dist(s_hi);
  const double um = 0.5 * (u_lo + u_hi);
  const auto dm = dist(um * um);
  bool negligible = true;
  bool split = false;
  for (std::size_t i = 0; i < da.size(); ++i) {
    const bool crosses = (da[i] > 0.0) != (db[i] > 0.0) || da[i] == 0.0 || db[i] == 0.0;
    const double ea = gauss_exponent(da[i], s_lo, D), eb = gauss_exponent(db[i], s_hi, D),
                 em = gauss_exponent(dm[i], um * um, D);
    const double emin = crosses ? 0.0 : std::min({ea, eb, em});
    const double emax = std::max({ea, eb, em});
    if (emin > 700.0) continue;
    negligible = false;
    if (emax - emin > 4.0) split = true;
  }
  if (negligible) return 0.0;
  if (split && depth < 60) {
    return usub_adaptive(t, u_lo, um, f, dist, D, depth + 1) +
           usub_adaptive(t, um, u_hi, f, dist, D, depth + 1);
  }
  return usub_segment(t, u_lo, u_hi, f);
}

template <class F>
double gl_segment(double a, double b, const F& f) {
  const double c = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  const auto& x = GL::abscissa();
  const auto& w = GL::weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += w[i] * (f(c - r * x[i]) + f(c + r * x[i]));
  return acc * r;
}

} // namespace quad

} // namespace fbp
