#pragma once

#include <cstddef>
#include <vector>

#include "fbp/data_model.hpp"
#include "fbp/quadrature.hpp"

namespace fbp {

/// Uniform time grid t_k = k * sigma / n, k = 0..n.
struct SolverGrid {
  double sigma = 1.0;
  std::size_t n = 100;
  double dt() const { return sigma / static_cast<double>(n); }
  double time(std::size_t k) const { return static_cast<double>(k) * dt(); }
  std::size_t levels() const { return n + 1; }
  GridFunction zeros() const { return GridFunction::constant(0.0, dt(), levels(), 0.0); }
  template <class F>
  GridFunction sample(F&& f) const { return GridFunction::sample(0.0, dt(), levels(), f); }
};

/// A spatial position held as origin + offset so that small separations stay exact.
struct Point {
  double origin = 0.0;
  double offset = 0.0;
  double value() const { return origin + offset; }
};

inline double separation(const Point& a, const Point& b) {
  return (a.origin - b.origin) + (a.offset - b.offset);
}

/// y(t) = origin + offset(t), offset piecewise linear on the solver grid.
struct Curve {
  double origin = 0.0;
  GridFunction offset;
  Point point(std::size_t k) const { return {origin, offset[k]}; }
  double operator[](std::size_t k) const { return origin + offset[k]; }
  GridFunction values() const;
};

struct Boundaries {
  Curve y0, y1;
};

struct Densities {
  GridFunction phi1; // w_y on the right boundary
  GridFunction phi2; // w_y on the left boundary
};

struct TraceFn {
  GridFunction h;      // w on the left boundary
  GridFunction hprime;
};

enum class ChiForm { corrected, direct };
enum class ExecPolicy { serial, parallel };
enum class WDeriv { value, d_y };

struct VolterraContext {
  ProblemData data;
  DerivedData derived;
  InitialProfiles profiles;
  SolverGrid grid;
  GridFunction f, fprime;
  ChiForm form = ChiForm::corrected;
  ExecPolicy exec = ExecPolicy::parallel;
};

VolterraContext make_context(const ProblemData& data, const DerivedData& derived,
                             InitialProfiles profiles, const SolverGrid& grid,
                             ChiForm form = ChiForm::corrected,
                             ExecPolicy exec = ExecPolicy::parallel);

Curve assemble_y0(const GridFunction& phi2, const TraceFn& trace, const VolterraContext& ctx);
Curve assemble_y1(const GridFunction& phi1, const VolterraContext& ctx);
Boundaries assemble_boundaries(const Densities& phi, const TraceFn& trace, const VolterraContext& ctx);

/// w or w_y at time level k. Points on a boundary get the one-sided limit from inside.
double eval_w(const Point& y, std::size_t k, const Densities& phi, const TraceFn& trace,
              const Boundaries& curves, const VolterraContext& ctx, WDeriv deriv = WDeriv::value);

Densities chi_map(const Densities& phi, const TraceFn& trace, const Boundaries& curves,
                  const VolterraContext& ctx);
Densities chi_map(const Densities& phi, const TraceFn& trace, const Boundaries& curves,
                  const VolterraContext& ctx, ExecPolicy exec);

double sigma_norm(const Densities& a);
double sigma_distance(const Densities& a, const Densities& b);

struct PicardResult {
  Densities phi;
  Boundaries curves;
  std::size_t iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
  std::vector<double> history;   // successive residuals
  double max_ratio = 0.0;        // largest measured residual ratio (0 if none measured)
  std::size_t ratios_measured = 0;
};

PicardResult picard_solve(const TraceFn& trace, const VolterraContext& ctx, double tol,
                          std::size_t max_iter, const Densities* initial = nullptr);

} // namespace fbp
