#pragma once

#include "fbp/data_model.hpp"

namespace fixtures {

// uncertified but well-behaved data used for residual and convergence checks
inline fbp::ProblemData moderate() {
  fbp::ProblemData d;
  d.D = 1.0;
  d.beta = 0.5;
  d.b = 0.5;
  d.C1 = 0.3;
  d.u0 = fbp::FunctionSpec::polynomial({1.0, -1.0});
  d.f = fbp::FunctionSpec::polynomial({1.0, 0.2});
  d.sigma_request = 0.05;
  return d;
}

// satisfies every certificate hypothesis; the admissible horizon is around 1e-15
inline fbp::ProblemData certified() {
  fbp::ProblemData d;
  d.D = 0.9;
  d.beta = 0.12;
  d.b = 0.08;
  d.C1 = 0.05;
  d.u0 = fbp::FunctionSpec::polynomial({0.19, -0.875});
  d.f = fbp::FunctionSpec::constant(0.19);
  d.sigma_request = 1.0;
  return d;
}

// u0 = f = beta: the quiescent state
inline fbp::ProblemData quiescent() {
  fbp::ProblemData d;
  d.D = 1.0;
  d.beta = 0.5;
  d.b = 0.4;
  d.C1 = 0.2;
  d.u0 = fbp::FunctionSpec::constant(0.5);
  d.f = fbp::FunctionSpec::constant(0.5);
  d.sigma_request = 0.1;
  return d;
}

} // namespace fixtures
