#pragma once

#include <cmath>
#include <numbers>

namespace fbp {

enum class Deriv { value, d_field, d_source, d_field2 };

struct KernelQuery {
  double x = 0.0;
  double t = 0.0;
  double xi = 0.0;
  double tau = 0.0;
  double D = 1.0;
  Deriv deriv = Deriv::value;
};

/// Fundamental solution K(x,t;xi,tau) of u_t = D u_xx and its partials.
double heat_kernel(const KernelQuery& q);
/// G = K(x,t;xi,tau) - K(-x,t;xi,tau).
double green(const KernelQuery& q);
/// N = K(x,t;xi,tau) + K(-x,t;xi,tau).
double neumann(const KernelQuery& q);

namespace detail {

constexpr double kUnderflowExponent = -700.0;

/// Gaussian profile k(r,s) = exp(-r^2/(4Ds)) / (2 sqrt(pi D s)) and its r-derivatives.
struct Gauss {
  double k = 0.0;   // k
  double kr = 0.0;  // dk/dr
  double krr = 0.0; // d2k/dr2
};

inline Gauss gauss(double r, double s, double D) {
  Gauss g;
  if (!(s > 0.0)) return g;
  const double a = 4.0 * D * s;
  const double e = -r * r / a;
  if (e < kUnderflowExponent) return g;
  g.k = std::exp(e) / std::sqrt(std::numbers::pi * a);
  const double c = 1.0 / (2.0 * D * s);
  g.kr = -r * c * g.k;
  g.krr = (r * r * c * c - c) * g.k;
  return g;
}

inline double gauss_value(double r, double s, double D) {
  if (!(s > 0.0)) return 0.0;
  const double a = 4.0 * D * s;
  const double e = -r * r / a;
  if (e < kUnderflowExponent) return 0.0;
  return std::exp(e) / std::sqrt(std::numbers::pi * a);
}

inline double gauss_slope(double r, double s, double D) {
  if (!(s > 0.0)) return 0.0;
  const double a = 4.0 * D * s;
  const double e = -r * r / a;
  if (e < kUnderflowExponent) return 0.0;
  return -r / (2.0 * D * s) * std::exp(e) / std::sqrt(std::numbers::pi * a);
}

} // namespace detail

/// Kernel pieces evaluated from the separation (x - xi), the image sum (x + xi)
/// and the elapsed time s = t - tau. Lets callers keep small differences exact.
struct KernelPair {
  detail::Gauss minus;
  detail::Gauss plus;

  static KernelPair at(double diff, double sum, double s, double D) {
    return {detail::gauss(diff, s, D), detail::gauss(sum, s, D)};
  }
  double G() const { return minus.k - plus.k; }
  double N() const { return minus.k + plus.k; }
  double G_y() const { return minus.kr - plus.kr; }
  double N_y() const { return minus.kr + plus.kr; }
  double G_xi() const { return -minus.kr - plus.kr; }
  double N_xi() const { return -minus.kr + plus.kr; }
  double G_yy() const { return minus.krr - plus.krr; }
  double N_yy() const { return minus.krr + plus.krr; }
};

} // namespace fbp
