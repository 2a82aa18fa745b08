#pragma once

#include <string>
#include <vector>

#include "fbp/errors.hpp"

namespace fbp {

/// Scalar function of one variable given by polynomial coefficients or a sample table.
struct FunctionSpec {
  enum class Kind { polynomial, table };
  Kind kind = Kind::polynomial;
  std::vector<double> coeffs; // ascending powers
  std::vector<double> xs, ys, dys;

  static FunctionSpec polynomial(std::vector<double> c);
  static FunctionSpec constant(double c) { return polynomial({c}); }
  static FunctionSpec table(std::vector<double> x, std::vector<double> y,
                            std::vector<double> dy = {});

  double operator()(double x) const;
  double derivative(double x) const;
  std::string describe() const;

  std::vector<double> slopes; // interpolant node derivatives for tables
};

struct ProblemData {
  double D = 1.0;
  double beta = 0.5;
  double b = 1.0;
  double C1 = 0.1;
  FunctionSpec u0;
  FunctionSpec f;
  double sigma_request = 1.0;
};

struct DerivedData {
  double U0 = 0.0;
  double C2 = 0.0;
  double norm_u0 = 0.0;
  double norm_u0prime_over_u0 = 0.0;
  double norm_f = 0.0;
  double norm_fprime = 0.0;
};

struct HypothesisCheck {
  std::string name;
  bool passed = false;
  double margin = 0.0; // positive when satisfied
  std::string detail;
};

struct HypothesisReport {
  std::vector<HypothesisCheck> checks;
  bool all_passed() const;
  bool passed(const std::string& name) const;
  const HypothesisCheck* find(const std::string& name) const;
  std::vector<std::string> failures() const;
};

struct DeriveResult {
  DerivedData derived;
  HypothesisReport report;
};

/// U0, C2 and sup-norms; hypothesis violations are reported, u0 <= 0 throws.
DeriveResult derive_constants(const ProblemData& data, std::size_t n_samples = 4001);

/// Initial data carried through the hodograph, Galilean and Hopf-Cole maps, tabulated on a
/// uniform z-grid over [C1, C2].
struct InitialProfiles {
  double C1 = 0.0, C2 = 0.0, D = 1.0, beta = 0.0, b = 0.0;
  double dz = 0.0;
  std::vector<double> z;      // nodes
  std::vector<double> x;      // g_inv(z)
  std::vector<double> v0, V0, V0p, logE, F, Fp;
  double M0 = 0.0;            // int F dz = D (E(C1) - 1)
  double E_C1 = 1.0;          // exp((1/D) int_{C1}^{C2} V0)

  FunctionSpec u0;

  double g(double xx) const;
  double g_inv(double zz) const;
  double v0_at(double zz) const;
  double F_at(double zz) const;
  double Fp_at(double zz) const;
  std::size_t cells() const { return z.size() - 1; }
};

InitialProfiles build_initial_profiles(const ProblemData& data, const DerivedData& derived,
                                       std::size_t n_cells = 4000);

} // namespace fbp
