#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fbp/outer.hpp"
#include "fbp/transform_chain.hpp"

namespace fbp {

/// u(x, t) in parametric form over the y-frame samples, plus the front s(t).
struct ParametricSolution {
  double dt = 1.0;
  std::vector<double> t;
  std::vector<std::vector<Point>> y;
  std::vector<std::vector<double>> x, u, cden;
  GridFunction s;     // front position
  GridFunction ds;    // s - s(0), kept separately for short horizons
  GridFunction sdot;  // central differences of ds
  std::vector<double> ux_front;         // u_x at x = s from the density on y1
  std::vector<double> ux_front_sampled; // one-sided difference of the samples
  double s0 = 0.0;
  double mass_scale_max_dev = 0.0; // max |kappa - 1| over the slices

  bool monotone = true;          // x strictly increasing in y on every slice
  double min_u_minus_beta = 0.0; // over x < s
  std::vector<std::string> monitors;

  std::size_t levels() const { return t.size(); }
  FieldFunction as_field() const; // nodes x, values u
};

/// Requires a converged bundle with field samples.
ParametricSolution reconstruct_solution(const SolutionBundle& bundle, const VolterraContext& ctx);

struct UniformSlice {
  std::vector<double> x, u;
};

/// Monotone cubic resampling of slice k onto n + 1 uniform points of [0, s(t_k)].
UniformSlice resample_uniform_x(const ParametricSolution& p, std::size_t k, std::size_t n);

/// Second-order differences with one-sided closures at both ends.
std::vector<double> time_derivative(const std::vector<double>& v, double dt);

} // namespace fbp
