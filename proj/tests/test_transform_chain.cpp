#include <doctest.h>

#include <cmath>

#include "fbp/errors.hpp"
#include "fbp/transform_chain.hpp"
#include "heat_chain.hpp"

using namespace fbp;

using fixtures::HeatChain;
using fixtures::run_chain;

TEST_CASE("hodograph of a constant field") {
  const double c = 2.0, D = 0.7, C1 = 0.3, b = 1.5;
  auto u = FieldFunction::sample(0.0, 0.1, 11, [&](double) { return linspace(0.0, b, 20); },
                                 [&](double, double) { return c; });
  auto r = hodograph_forward(u, D, C1);
  for (std::size_t k = 0; k < u.steps(); ++k) {
    const double t = u.time(k);
    CHECK(r.z0[k] == doctest::Approx(C1 + c * t).epsilon(1e-14));
    CHECK(r.z1[k] - r.z0[k] == doctest::Approx(b / c).epsilon(1e-14));
    for (std::size_t i = 0; i < u.nodes[k].size(); ++i) {
      CHECK(r.v.coord(k, i) == doctest::Approx(C1 + c * t + u.coord(k, i) / c).epsilon(1e-14));
      CHECK(r.v.value(k, i) == c);
    }
  }
  auto back = hodograph_inverse(r.v);
  for (std::size_t k = 0; k < u.steps(); ++k) CHECK(back.s[k] == doctest::Approx(b).epsilon(1e-14));
  CHECK(node_distance(back.u, u) < 1e-14);
}

TEST_CASE("hodograph rejects nonpositive fields") {
  auto u = FieldFunction::sample(0.0, 0.1, 3, [](double) { return linspace(0.0, 1.0, 4); },
                                 [](double x, double) { return 0.5 - x; });
  CHECK_THROWS_AS(hodograph_forward(u, 1.0, 0.1), InvalidField);
  CHECK_THROWS_AS(hodograph_inverse(u), InvalidField);
}

TEST_CASE("hodograph round trip on a 201 by 201 grid") {
  auto u = FieldFunction::sample(
      0.0, 1.0 / 200, 201, [](double t) { return linspace(0.0, 1.0 + 0.5 * t, 200); },
      [](double x, double t) { return 1.0 + 0.3 * std::exp(-t) * std::cos(x); });
  auto fwd = hodograph_forward(u, 0.8, 0.25);
  auto inv = hodograph_inverse(fwd.v);
  CHECK(node_distance(inv.u, u) < 1e-6);
  for (std::size_t k = 0; k < u.steps(); ++k) CHECK(std::abs(inv.s[k] - u.hi(k)) < 1e-6);
}

TEST_CASE("galilean shift") {
  auto v = FieldFunction::sample(0.0, 0.25, 5, [](double t) { return linspace(t, 2.0 + t, 8); },
                                 [](double z, double t) { return std::sin(z) + t; });
  auto same = galilean_shift(v, 0.0, Direction::forward);
  CHECK(node_distance(same.field, v) == 0.0);

  auto two = FieldFunction::sample(0.0, 0.25, 5, [](double) { return linspace(0.0, 1.0, 4); },
                                   [](double, double) { return 2.0; });
  auto s = galilean_shift(two, 0.5, Direction::forward);
  for (std::size_t k = 0; k < two.steps(); ++k) {
    CHECK(s.lo[k] == doctest::Approx(-two.time(k)));
    CHECK(s.hi[k] == doctest::Approx(1.0 - two.time(k)));
    for (std::size_t i = 0; i < 5; ++i) CHECK(s.field.value(k, i) == 1.5);
  }
  auto back = galilean_shift(galilean_shift(v, 0.37, Direction::forward).field, 0.37, Direction::inverse);
  for (std::size_t k = 0; k < v.steps(); ++k)
    for (std::size_t i = 0; i < v.nodes[k].size(); ++i) {
      CHECK(back.field.coord(k, i) == v.coord(k, i));
      CHECK(back.field.value(k, i) == v.value(k, i));
    }
}

TEST_CASE("hopf-cole examples") {
  auto zero = FieldFunction::sample(0.0, 0.1, 6, [](double t) { return linspace(-t, 1.0, 10); },
                                    [](double, double) { return 0.0; });
  auto fw = hopf_cole_forward(zero, 0.9);
  CHECK(sup_abs(fw.w) == 0.0);
  CHECK(fw.state.eta.values[3][4] == 1.0);
  for (double c : fw.state.C.values) CHECK(c == 1.0);

  auto vanish = FieldFunction::sample(0.0, 0.1, 6, [](double) { return linspace(0.0, 1.0, 10); },
                                      [](double y, double t) { return (1.0 - y) * (1 + t); });
  auto fv = hopf_cole_forward(vanish, 0.9);
  for (std::size_t k = 0; k < vanish.steps(); ++k) {
    CHECK(fv.w.values[k].back() == 0.0);
    CHECK(fv.state.eta.values[k].back() == 1.0);
  }
  CHECK(fv.state.C[0] == 1.0);

  const double w0 = 0.4, D = 0.8;
  auto wc = FieldFunction::sample(0.0, 0.1, 4, [](double t) { return linspace(0.0, 1.0 + t, 16); },
                                  [&](double, double) { return w0; });
  auto V = hopf_cole_inverse(wc, GridFunction::constant(0.0, 0.1, 4, 1.0), D);
  for (std::size_t k = 0; k < V.steps(); ++k)
    for (std::size_t i = 0; i < V.nodes[k].size(); ++i) {
      const double y = V.coord(k, i), y1 = V.hi(k);
      CHECK(V.value(k, i) == doctest::Approx(w0 / (1 + w0 * (y1 - y) / D)).epsilon(1e-13));
    }

  auto big = FieldFunction::sample(0.0, 0.1, 4, [](double) { return linspace(0.0, 1.0, 16); },
                                   [](double, double) { return -5.0; });
  CHECK_THROWS_AS(hopf_cole_inverse(big, GridFunction::constant(0.0, 0.1, 4, 1.0), 1.0), HorizonExceeded);
  auto badC = GridFunction::sample(0.0, 0.1, 6, [](double t) { return 0.2 - t; });
  CHECK_THROWS_AS(hopf_cole_forward(zero, 1.0, &badC), HorizonExceeded);
}

TEST_CASE("hopf-cole round trips on a 201 by 201 grid") {
  const double D = 0.9;
  auto nodes = [](double t) { return linspace(-0.2 * t, 1.0 + 0.3 * t, 200); };
  auto V = FieldFunction::sample(0.0, 1.0 / 200, 201, nodes,
                                 [](double y, double t) { return 0.5 * std::sin(y + t) + 0.2; });
  auto C = GridFunction::sample(0.0, 1.0 / 200, 201, [](double t) { return 1.0 + 0.1 * t; });
  auto fw = hopf_cole_forward(V, D, &C);
  CHECK(node_distance(hopf_cole_inverse(fw.w, C, D), V) < 1e-6);
  for (std::size_t k = 0; k < V.steps(); ++k) CHECK(fw.state.eta.values[k].back() == 1.0);

  auto w = FieldFunction::sample(0.0, 1.0 / 200, 201, nodes,
                                 [](double y, double t) { return 0.3 * std::cos(2 * y - t); });
  auto back = hopf_cole_forward(hopf_cole_inverse(w, C, D), D, &C).w;
  CHECK(node_distance(back, w) < 1e-6);
}

TEST_CASE("flux form of C") {
  auto phi = GridFunction::sample(0.0, 0.01, 101, [](double t) { return 2 * t; });
  auto C = hopf_cole_C_from_flux(phi);
  CHECK(C[0] == 1.0);
  for (std::size_t k = 0; k < C.size(); ++k)
    CHECK(C[k] == doctest::Approx(1 - C.time(k) * C.time(k)).epsilon(1e-13));
}

TEST_CASE("full chain residuals converge under refinement") {
  HeatChain hc;
  const auto r1 = run_chain(hc, 40);
  const auto r2 = run_chain(hc, 80);
  const auto r3 = run_chain(hc, 160);
  auto order = [](double a, double b) { return std::log2(a / b); };
  for (auto [a, b, c] : {std::tuple{r1.heat, r2.heat, r3.heat},
                         std::tuple{r1.burgers_V, r2.burgers_V, r3.burgers_V},
                         std::tuple{r1.burgers_v, r2.burgers_v, r3.burgers_v},
                         std::tuple{r1.calor, r2.calor, r3.calor}}) {
    INFO("residuals " << a << " " << b << " " << c);
    CHECK(order(a, b) >= 1.0);
    CHECK(order(b, c) >= 1.0);
  }
  CHECK(r3.C_err < 1e-4);
  CHECK(r3.C_err < r1.C_err);
}
