#include "fbp/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace fbp {

namespace {
constexpr double pi = std::numbers::pi;
constexpr double e = std::numbers::e;
} // namespace

CertificateInputs certificate_inputs(const ProblemData& data, const DerivedData& derived) {
  CertificateInputs in;
  in.D = data.D;
  in.beta = data.beta;
  in.C1 = data.C1;
  in.U0 = derived.U0;
  in.norm_u0 = derived.norm_u0;
  in.norm_u0prime_over_u0 = derived.norm_u0prime_over_u0;
  in.norm_f = derived.norm_f;
  in.norm_fprime = derived.norm_fprime;
  return in;
}

double Certificate::H1(double sigma) const { return H1_coefficient * std::sqrt(sigma); }
double Certificate::H2(double sigma) const { return H2_coefficient * std::sqrt(sigma); }

void add_smallness_checks(HypothesisReport& report, const CertificateInputs& in) {
  const double nf = in.norm_f, b = in.beta, D = in.D;
  const double lhs = (nf + b) * (2.0 * in.C1 + 3.0 * in.U0);
  report.checks.push_back({"ipp", lhs < 2.0 * D, 2.0 * D - lhs, "(|f| + beta)(2 C1 + 3 U0) < 2 D"});
  const double den = (2.0 * D - lhs) * (3.0 - D);
  const std::string ip_text = "4 D |f| (|f| + beta) / ((2D - (|f| + beta)(2 C1 + 3 U0))(3 - D)) < 1";
  if (den > 0.0) {
    const double ip = 4.0 * D * nf * (nf + b) / den;
    report.checks.push_back({"ip", ip < 1.0, 1.0 - ip, ip_text});
  } else {
    report.checks.push_back({"ip", false, -1.0, ip_text + " (undefined while ipp fails)"});
  }
}

HypothesisReport check_hypotheses(const ProblemData& data, const DerivedData& derived) {
  auto report = derive_constants(data).report;
  add_smallness_checks(report, certificate_inputs(data, derived));
  return report;
}

SigmaAdmissible sigma_admissible(const Certificate& c) {
  SigmaAdmissible s;
  if (!c.valid) {
    s.reasons = c.reasons;
    return s;
  }
  const double b = c.in.beta, D = c.in.D, M = c.M, H = c.H;
  s.caps = {{"unit", 1.0},
            {"right_boundary", c.in.C2() / (2.0 * (1.0 + b) * (1.0 + M / (b * b)))},
            {"left_boundary", c.in.C1 / (b + 2.0 * M * D / H)},
            {"trace_floor", H / (4.0 * M * (b + 2.0 * D * M / H))},
            {"H1", 1.0 / (c.H1_coefficient * c.H1_coefficient)},
            {"H2", 1.0 / (c.H2_coefficient * c.H2_coefficient)}};
  s.sigma_max = 1.0;
  for (const auto& cap : s.caps) {
    if (!(cap.value > 0.0) || !std::isfinite(cap.value)) {
      s.reasons.push_back("cap " + cap.name + " is not positive");
      s.sigma_max = 0.0;
    }
    s.sigma_max = std::min(s.sigma_max, cap.value);
  }
  if (!s.reasons.empty()) s.sigma_max = 0.0;
  return s;
}

Certificate compute_certificate(const CertificateInputs& in, const HypothesisReport& flags) {
  Certificate c;
  c.in = in;
  c.hypotheses = flags;
  const double D = in.D, b = in.beta, C1 = in.C1, U0 = in.U0, C2 = in.C2();
  const double nu0 = in.norm_u0, nu0p = in.norm_u0prime_over_u0, nf = in.norm_f, nfp = in.norm_fprime;
  const double sq = std::sqrt(pi);

  for (const auto& name : {"D_range", "ipp", "ip", "C1_range", "beta_positive", "C1_positive"})
    if (const auto* h = flags.find(name); h && !h->passed) c.reasons.push_back(std::string(name) + " violated");

  c.A1 = std::exp((nu0 + b) * U0 / D) * (nu0p + (nu0 + b) / D);
  c.A1_statement = std::exp((nu0 + b * U0) / D) * (nu0p + (nu0 + b) / D);
  c.E1 = 1.0 + 2.0 * (1.0 / (2.0 - D) + nf / (b * (3.0 - D))) * c.A1;
  c.E2 = 2.0 * nf / (3.0 - D);
  const double den = 2.0 * D - (nf + b) * (2.0 * C1 + 3.0 * U0);
  if (!(den > 0.0)) {
    c.reasons.push_back("ipp violated: E3 undefined");
    return c;
  }
  c.E3 = 2.0 * D * (nf + b) / den;
  if (!(c.E2 * c.E3 < 1.0)) {
    c.reasons.push_back("ip violated");
    return c;
  }
  c.H = b / 2.0;
  c.R = c.E3 * (1.0 + c.E1) / (1.0 - c.E3 * c.E2);
  c.M = (c.E1 + c.E2 * c.E3) / (1.0 - c.E3 * c.E2);
  const double M = c.M, R = c.R, H = c.H;
  c.S = c.E3 * (2.0 * nfp / b + (nf + b) * (b / D + M * (2.0 / b + 1.0 / D)));
  const double S = c.S;

  const double g2 = std::pow(2.0 * D / (3.0 * e), 1.5);
  c.A2 = M * std::sqrt(D) / (2.0 * sq) * (2.0 * M + 3.0 / (C2 * C2) * g2);
  c.A31 = (3.0 * C2 - C1) / 2.0 * std::pow(24.0 * D / (e * (C2 - 3.0 * C1) * (C2 - 3.0 * C1)), 1.5);
  c.A32 = 18.0 * std::sqrt(6.0) / (std::pow(e, 1.5) * (C1 + C2) * (C1 + C2));
  c.A3 = R * b / (2.0 * std::sqrt(D * pi)) * (c.A31 + c.A32);
  c.A4 = M * std::sqrt(D) / (2.0 * sq) * (c.A31 + c.A32);
  c.A5 = 2.0 * S / std::sqrt(D * pi);
  c.A6 = b * R * M * std::sqrt(D) / (2.0 * sq) * (2.0 * M + 3.0 / (C1 * C1) * g2);
  c.A7 = D * M * (2.0 * M + 3.0 / (C1 * C1) * g2);

  const double d = C2 - 3.0 * C1, p = C2 + C1, q = 3.0 * C2 - C1;
  const double e15 = std::pow(e, 1.5);
  c.P1 = 2.0 / (D * sq) * ((nu0 + b) * std::exp(U0 / b * (nu0 + b)) + (nu0 + b) * (nu0 + b) / D);
  c.P2 = std::sqrt(D) / (4.0 * sq) *
         (6.0 * M + 3.0 / (C2 * C2) * std::pow(2.0 / (3.0 * e), 1.5) + 6.0 * M / (C2 * C2) * std::pow(6.0 / e, 1.5));
  c.P31 = 1.0 / (sq * e15) *
          (std::sqrt(6.0) * q * q / (16.0 * d * d * d) + 27.0 * std::sqrt(3.0) / 4.0 + 12.0 * std::sqrt(6.0) / (d * d * d) +
           6.0 * std::sqrt(3.0) / (p * p * p));
  c.P32 = 12.0 * std::sqrt(6.0) / (sq * e15) * (1.0 / (d * d * d) + 9.0 / 8.0 + q * q / (8.0 * d * d * d) + 1.0 / (p * p));
  c.P3 = R * b * (c.P31 + c.P32);
  c.P41 = std::sqrt(6.0) / std::sqrt(pi * e) * (1.0 / (d * d) + 1.0 / (p * p));
  c.P4 = D * (M * (c.P31 + c.P32) + c.P41);
  c.P5 = std::pow(6.0, 1.5) * S * D / (sq * e15) * (q / (d * d * d) + 3.0 / (p * p));
  c.P6 = b * R *
         (1.0 / (2.0 * D) / std::sqrt(D * pi) * (2.0 * D / H + 2.0 / H * std::pow(b + 2.0 * D * M / H, 2)) +
          std::pow(6.0 / (e * C1 * C1), 1.5) * (18.0 * C1 * C1 + 1.0) / (4.0 * sq) * 4.0 * D / H);
  c.P7 = std::sqrt(D) / (4.0 * sq) *
         (6.0 * M + 3.0 / (C1 * C1) * std::pow(2.0 / (3.0 * e), 1.5) + 6.0 * M / (C1 * C1) * std::pow(6.0 / e, 1.5));

  const double a = 2.0 / (2.0 - D), w = 2.0 * nf / (b * (3.0 - D)), extra = 2.0 * S / std::sqrt(pi * D);
  c.H1_coefficient = a * (c.A2 + c.A3 + c.A4 + extra) + w * (c.A4 + c.A5 + c.A6 + extra);
  c.H1_coefficient_single = a * (c.A2 + c.A3 + c.A4 + extra) + w * (c.A4 + c.A5 + c.A6);
  c.H2_coefficient = a * (c.P1 + c.P2 + c.P3 + c.P4 + c.P5) + w * (c.P1 + c.P4 + c.P5 + c.P6 + c.P7);

  c.valid = c.reasons.empty();
  if (c.valid) {
    auto s = sigma_admissible(c);
    c.sigma_max = s.sigma_max;
    c.caps = s.caps;
    Certificate single = c;
    single.H1_coefficient = c.H1_coefficient_single;
    c.sigma_max_single = sigma_admissible(single).sigma_max;
    for (auto& r : s.reasons) c.reasons.push_back(r);
    if (!s.reasons.empty()) c.valid = false;
  }
  return c;
}

Certificate compute_certificate(const ProblemData& data, const DerivedData& derived) {
  return compute_certificate(certificate_inputs(data, derived), check_hypotheses(data, derived));
}

nlohmann::json to_json(const HypothesisReport& r) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& c : r.checks)
    j.push_back({{"name", c.name}, {"passed", c.passed}, {"margin", c.margin}, {"detail", c.detail}});
  return j;
}

HypothesisReport hypotheses_from_json(const nlohmann::json& j) {
  HypothesisReport r;
  for (const auto& c : j)
    r.checks.push_back({c.at("name").get<std::string>(), c.at("passed").get<bool>(), c.at("margin").get<double>(),
                        c.at("detail").get<std::string>()});
  return r;
}

namespace {

// symbol name -> member, shared by both directions of the serialisation
template <class C, class Fn>
void each_constant(C& c, Fn&& fn) {
  fn("A1", c.A1); fn("A1_statement", c.A1_statement); fn("A2", c.A2); fn("A3", c.A3);
  fn("A31", c.A31); fn("A32", c.A32); fn("A4", c.A4); fn("A5", c.A5); fn("A6", c.A6); fn("A7", c.A7);
  fn("P1", c.P1); fn("P2", c.P2); fn("P3", c.P3); fn("P31", c.P31); fn("P32", c.P32); fn("P4", c.P4);
  fn("P41", c.P41); fn("P5", c.P5); fn("P6", c.P6); fn("P7", c.P7);
  fn("E1", c.E1); fn("E2", c.E2); fn("E3", c.E3);
  fn("H", c.H); fn("R", c.R); fn("S", c.S); fn("M", c.M);
  fn("H1_coefficient", c.H1_coefficient); fn("H2_coefficient", c.H2_coefficient);
  fn("H1_coefficient_single", c.H1_coefficient_single);
  fn("sigma_max", c.sigma_max); fn("sigma_max_single", c.sigma_max_single);
}

template <class I, class Fn>
void each_input(I& in, Fn&& fn) {
  fn("D", in.D); fn("beta", in.beta); fn("C1", in.C1); fn("U0", in.U0);
  fn("norm_u0", in.norm_u0); fn("norm_u0prime_over_u0", in.norm_u0prime_over_u0);
  fn("norm_f", in.norm_f); fn("norm_fprime", in.norm_fprime);
}

// JSON has no infinities or NaN; they travel as strings
nlohmann::json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double unnum(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return std::numeric_limits<double>::quiet_NaN();
}

} // namespace

nlohmann::json to_json(const Certificate& c) {
  nlohmann::json j;
  j["valid"] = c.valid;
  j["reasons"] = c.reasons;
  j["hypotheses"] = to_json(c.hypotheses);
  nlohmann::json in;
  each_input(c.in, [&](const char* k, double v) { in[k] = num(v); });
  j["inputs"] = in;
  nlohmann::json k;
  each_constant(c, [&](const char* n, double v) { k[n] = num(v); });
  j["constants"] = k;
  nlohmann::json caps = nlohmann::json::array();
  for (const auto& cap : c.caps) caps.push_back({{"name", cap.name}, {"value", num(cap.value)}});
  j["sigma_caps"] = caps;
  return j;
}

Certificate certificate_from_json(const nlohmann::json& j) {
  Certificate c;
  c.valid = j.at("valid").get<bool>();
  c.reasons = j.at("reasons").get<std::vector<std::string>>();
  c.hypotheses = hypotheses_from_json(j.at("hypotheses"));
  const auto& in = j.at("inputs");
  each_input(c.in, [&](const char* k, double& v) { v = unnum(in.at(k)); });
  const auto& k = j.at("constants");
  each_constant(c, [&](const char* n, double& v) { v = unnum(k.at(n)); });
  for (const auto& cap : j.at("sigma_caps")) c.caps.push_back({cap.at("name").get<std::string>(), unnum(cap.at("value"))});
  return c;
}

} // namespace fbp
