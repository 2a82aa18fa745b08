#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fbp/data_model.hpp"

namespace fbp {

/// Scalars entering the existence constants.
struct CertificateInputs {
  double D = 1.0, beta = 0.5, C1 = 0.1, U0 = 1.0;
  double norm_u0 = 0.0;             // sup |u0|
  double norm_u0prime_over_u0 = 0.0; // sup |u0'/u0|
  double norm_f = 0.0, norm_fprime = 0.0;
  double C2() const { return C1 + U0; }
};

CertificateInputs certificate_inputs(const ProblemData& data, const DerivedData& derived);

struct SigmaCap {
  std::string name;
  double value = 0.0;
};

struct Certificate {
  CertificateInputs in;
  bool valid = false;
  std::vector<std::string> reasons;
  HypothesisReport hypotheses;

  double A1 = 0, A1_statement = 0, A2 = 0, A3 = 0, A31 = 0, A32 = 0, A4 = 0, A5 = 0, A6 = 0, A7 = 0;
  double P1 = 0, P2 = 0, P3 = 0, P31 = 0, P32 = 0, P4 = 0, P41 = 0, P5 = 0, P6 = 0, P7 = 0;
  double E1 = 0, E2 = 0, E3 = 0;
  double H = 0, R = 0, S = 0, M = 0;
  double H1_coefficient = 0, H2_coefficient = 0;
  double H1_coefficient_single = 0; // without the repeated 2S/sqrt(pi D) term
  double sigma_max = 0, sigma_max_single = 0;
  std::vector<SigmaCap> caps;

  double H1(double sigma) const;
  double H2(double sigma) const;
};

/// Data hypotheses plus the two smallness conditions on (f, beta, C1, U0, D).
HypothesisReport check_hypotheses(const ProblemData& data, const DerivedData& derived);
void add_smallness_checks(HypothesisReport& report, const CertificateInputs& in);

Certificate compute_certificate(const CertificateInputs& in, const HypothesisReport& flags);
Certificate compute_certificate(const ProblemData& data, const DerivedData& derived);

struct SigmaAdmissible {
  double sigma_max = 0.0;
  std::vector<SigmaCap> caps;
  std::vector<std::string> reasons;
};

SigmaAdmissible sigma_admissible(const Certificate& cert);

nlohmann::json to_json(const HypothesisReport& r);
HypothesisReport hypotheses_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Certificate& c);
Certificate certificate_from_json(const nlohmann::json& j);

} // namespace fbp
