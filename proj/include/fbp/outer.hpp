#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fbp/transform_chain.hpp"
#include "fbp/volterra.hpp"

namespace fbp {

/// Bounds defining the admissible set of traces.
struct PiSpec {
  double H = 0.0;     // lower bound on h
  double R = 0.0;     // sup-norm bound
  double S = 0.0;     // bound on |h'|
  double sigma = 1.0;
};

struct PiViolation {
  std::string kind; // "lower", "sup", "slope"
  std::size_t index = 0;
  double value = 0.0;
  double bound = 0.0;
};

struct PiReport {
  bool member = true;
  std::vector<PiViolation> violations;
};

PiReport pi_membership(const TraceFn& trace, const PiSpec& pi);

/// h(t) = (f(t) - beta) E(C1), the trace of the unperturbed initial state.
TraceFn initial_trace(const VolterraContext& ctx);

struct ZResult {
  TraceFn Z;
  PicardResult inner;
  GridFunction dC; // -int phi1
  GridFunction dM; // int (D phi1 + beta^2 h / f - D beta phi2 / f)
  GridFunction E;  // E(C1) + dC + dM / D
};

ZResult Z_map(const TraceFn& trace, const VolterraContext& ctx, double picard_tol,
              std::size_t max_iter, const Densities* warm = nullptr);

struct OuterOptions {
  double picard_tol = 1e-10;
  double outer_tol = 1e-8;
  std::size_t max_iter = 200;
  std::size_t max_outer = 100;
  double relaxation = 1.0;
  std::optional<PiSpec> pi;
  std::size_t field_nodes = 0; // spatial intervals for field samples; 0 skips sampling
};

/// w sampled on uniform nodes between the boundaries at every time level.
struct FieldSamples {
  std::vector<std::vector<Point>> y;
  std::vector<std::vector<double>> w;
  double dt = 1.0;
  bool empty() const { return y.empty(); }
  FieldFunction as_field() const;
};

struct SolutionBundle {
  bool converged = false;
  std::string failure;
  std::size_t outer_iterations = 0;
  std::vector<double> outer_history;
  std::vector<PiReport> pi_reports;
  TraceFn h;
  Densities phi;
  Boundaries curves;
  GridFunction dC, dM, E;
  std::vector<std::size_t> inner_iterations;
  std::vector<std::vector<double>> inner_histories;
  double max_inner_ratio = 0.0;
  double final_inner_residual = 0.0;
  FieldSamples field;
};

FieldSamples sample_field(const SolutionBundle& b, const VolterraContext& ctx, std::size_t n_space);

SolutionBundle solve_outer(const VolterraContext& ctx, const OuterOptions& opts);

} // namespace fbp
