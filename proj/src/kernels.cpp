#include "fbp/kernels.hpp"

#include <stdexcept>

namespace fbp {

namespace {

void validate(const KernelQuery& q) {
  if (!std::isfinite(q.x) || !std::isfinite(q.t) || !std::isfinite(q.xi) ||
      !std::isfinite(q.tau) || !std::isfinite(q.D))
    throw std::invalid_argument("kernel query has non-finite input");
  if (!(q.D > 0.0)) throw std::invalid_argument("kernel query requires D > 0");
}

// Partial of k(sign_x * x - xi) w.r.t. the requested variable.
double image_term(double r, double dr_dx, double dr_dxi, double s, double D, Deriv d) {
  const auto g = detail::gauss(r, s, D);
  switch (d) {
  case Deriv::value: return g.k;
  case Deriv::d_field: return g.kr * dr_dx;
  case Deriv::d_source: return g.kr * dr_dxi;
  case Deriv::d_field2: return g.krr * dr_dx * dr_dx;
  }
  return 0.0;
}

} // namespace

double heat_kernel(const KernelQuery& q) {
  validate(q);
  const double s = q.t - q.tau;
  if (!(s > 0.0)) return 0.0;
  return image_term(q.x - q.xi, 1.0, -1.0, s, q.D, q.deriv);
}

double green(const KernelQuery& q) {
  validate(q);
  const double s = q.t - q.tau;
  if (!(s > 0.0)) return 0.0;
  return image_term(q.x - q.xi, 1.0, -1.0, s, q.D, q.deriv) -
         image_term(-q.x - q.xi, -1.0, -1.0, s, q.D, q.deriv);
}

double neumann(const KernelQuery& q) {
  validate(q);
  const double s = q.t - q.tau;
  if (!(s > 0.0)) return 0.0;
  return image_term(q.x - q.xi, 1.0, -1.0, s, q.D, q.deriv) +
         image_term(-q.x - q.xi, -1.0, -1.0, s, q.D, q.deriv);
}

} // namespace fbp
