#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fbp/outer.hpp"
#include "fbp/reconstruction.hpp"

namespace fbp {

struct NormEntry {
  std::string name;
  double sup = 0.0;
  double rms = 0.0;
  std::size_t count = 0;
};

struct ResidualReport {
  std::vector<NormEntry> entries;
  bool partial = false;
  std::vector<std::string> notes;
  std::size_t n_time = 0, n_space = 0;
  double sigma = 0.0;

  const NormEntry* find(const std::string& name) const;
  double sup(const std::string& name) const; // throws if absent
  void add(std::string name, const std::vector<double>& r);
};

nlohmann::json to_json(const ResidualReport& r);

/// Differences of the sampled fields in all three frames, boundary and Stefan conditions,
/// fixed-point mismatch of the trace and the mass balance.
ResidualReport residual_suite(const SolutionBundle& b, const ParametricSolution& p, const VolterraContext& ctx);

/// Heat solution with its partials.
struct Manufactured {
  std::string name;
  std::function<double(double, double)> w, w_y, w_t, w_yy; // (y, t)
};

Manufactured mms_zero();
Manufactured mms_linear(double a, double b);  // a + b y
Manufactured mms_quadratic(double D);         // 2 D t + y^2
Manufactured mms_combine(double a, const Manufactured& m1, double b, const Manufactured& m2);

struct PrescribedCurve {
  std::function<double(double)> y, dy;
};

PrescribedCurve straight_curve(double y_start, double velocity);

/// Which kernel multiplies the trace of w in the boundary double layers.
enum class DoubleLayer { source_derivative, field_derivative };

struct MmsSettings {
  double D = 1.0;
  double sigma = 1.0;
  std::size_t n = 400;
  std::vector<double> time_fractions{0.25, 0.5, 1.0};
  std::vector<double> space_fractions{0.1, 0.3, 0.5, 0.7, 0.9};
  DoubleLayer layer = DoubleLayer::source_derivative;
};

struct MmsSample {
  double t, y, exact, represented;
};

struct MmsResult {
  double error = 0.0; // sup over samples
  std::vector<MmsSample> samples;
};

/// Green's identity on the region between two prescribed curves with traces read off w.
MmsResult mms_representation_check(const Manufactured& m, const PrescribedCurve& y0, const PrescribedCurve& y1,
                                   const MmsSettings& s);

enum class Side { above, below };

struct JumpResult {
  std::array<double, 3> eps{};    // h, 2h, 4h
  std::array<double, 3> values{}; // V at curve(t) -/+ eps
  double limit = 0.0;             // Richardson extrapolation
  double direct = 0.0;            // integral evaluated on the curve
  double predicted = 0.0;         // direct -/+ psi(t) / (2D)
  double mismatch = 0.0;
  bool diverged = false;
};

/// One-sided limits of d/dy int psi(tau) K(y, t; curve(tau), tau) dtau at the last grid time.
JumpResult jump_relation_check(const GridFunction& psi, const GridFunction& curve, Side side, double D,
                               double h = 0.0);

struct IbpResult {
  std::vector<double> direct, by_parts; // per level, at y1
  double max_abs = 0.0;
  double max_rel = 0.0; // relative to the largest |direct| + |h(0) N|
};

/// -int h' N(y1(t), t; y0, tau) dtau against its integrated-by-parts form.
IbpResult ibp_equivalence_check(const SolutionBundle& b, const VolterraContext& ctx);

} // namespace fbp
