#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "fbp/quadrature.hpp"

namespace fbp {

/// Space-time field on a uniform time grid with sorted (possibly moving) spatial nodes.
/// Physical coordinate of node i at step k is nodes[k][i] + drift * t_k, physical value
/// is values[k][i] + bias; this keeps Galilean shifts exactly invertible.
struct FieldFunction {
  double t0 = 0.0;
  double dt = 1.0;
  std::vector<std::vector<double>> nodes;
  std::vector<std::vector<double>> values;
  double drift = 0.0;
  double bias = 0.0;

  std::size_t steps() const { return nodes.size(); }
  double time(std::size_t k) const { return t0 + dt * static_cast<double>(k); }
  double coord(std::size_t k, std::size_t i) const { return nodes[k][i] + drift * time(k); }
  double value(std::size_t k, std::size_t i) const { return values[k][i] + bias; }
  std::vector<double> coords(std::size_t k) const;
  std::vector<double> vals(std::size_t k) const;
  double lo(std::size_t k) const { return coord(k, 0); }
  double hi(std::size_t k) const { return coord(k, nodes[k].size() - 1); }
  /// Linear interpolation in slice k; throws OutOfDomain outside [lo, hi].
  double at(std::size_t k, double y) const;
  /// Materialised copy with drift and bias folded in.
  FieldFunction flattened() const;
  void validate() const;

  template <class Nodes, class Fn>
  static FieldFunction sample(double t0, double dt, std::size_t steps, Nodes&& nodes_at, Fn&& fn) {
    FieldFunction f;
    f.t0 = t0;
    f.dt = dt;
    for (std::size_t k = 0; k < steps; ++k) {
      const double t = f.time(k);
      std::vector<double> y = nodes_at(t);
      std::vector<double> v(y.size());
      for (std::size_t i = 0; i < y.size(); ++i) v[i] = fn(y[i], t);
      f.nodes.push_back(std::move(y));
      f.values.push_back(std::move(v));
    }
    return f;
  }
};

/// n+1 evenly spaced nodes on [a, b].
std::vector<double> linspace(double a, double b, std::size_t n);

enum class Direction { forward, inverse };

struct HodographResult {
  FieldFunction v;   // v(z, t) = u(x, t)
  GridFunction z0;   // left boundary
  GridFunction z1;   // right boundary
};

/// (x, t) -> (z, t) with z_x = 1/u, z_t = u - D u_x; z0(0) = C1.
HodographResult hodograph_forward(const FieldFunction& u, double D, double C1);

struct HodographInverse {
  FieldFunction u;   // on [0, s(t)]
  GridFunction s;
};

/// x = int_{z0}^{z} v.
HodographInverse hodograph_inverse(const FieldFunction& v);

struct ShiftResult {
  FieldFunction field;
  GridFunction lo, hi;
};

/// forward: y = z - 2 beta t, V = v - beta; inverse undoes it exactly.
ShiftResult galilean_shift(const FieldFunction& field, double beta, Direction dir);

struct HopfColeState {
  GridFunction C;
  FieldFunction eta; // exp((1/D) int_y^{y1} V)
};

struct HopfColeForward {
  FieldFunction w;
  HopfColeState state;
};

/// w = C V eta. With C empty, C solves C' = -C[(V_y - V^2/D) + V y1'/D] at y1, C(0) = 1.
HopfColeForward hopf_cole_forward(const FieldFunction& V, double D, const GridFunction* C = nullptr);

/// V = w / (C + (1/D) int_y^{y1} w); throws HorizonExceeded when the denominator is not positive.
FieldFunction hopf_cole_inverse(const FieldFunction& w, const GridFunction& C, double D);

/// C(t) = 1 - int_0^t phi1 (trapezoid on the grid of phi1).
GridFunction hopf_cole_C_from_flux(const GridFunction& phi1);

/// Local derivatives at an interior node, with time derivative taken at fixed position.
struct LocalDerivs {
  double value, t, y, yy;
};

/// Pointwise residual of a second-order evolution equation evaluated by differences on the
/// moving node set (node counts must agree across steps). Interior nodes only.
FieldFunction residual_field(const FieldFunction& f, const std::function<double(const LocalDerivs&)>& op);

double heat_residual_sup(const FieldFunction& w, double D);
double burgers_residual_sup(const FieldFunction& V, double D);
/// u_t - u^2 (D u_xx - u_x)
double calor_residual_sup(const FieldFunction& u, double D);

double sup_abs(const FieldFunction& f);
/// Node-aligned distance: max over nodes of |coordinate difference| + |value difference|.
double node_distance(const FieldFunction& a, const FieldFunction& b);

} // namespace fbp
