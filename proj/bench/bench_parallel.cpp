#include <benchmark/benchmark.h>

#include "fbp/data_model.hpp"
#include "fbp/outer.hpp"
#include "fbp/volterra.hpp"

using namespace fbp;

namespace {

ProblemData data() {
  ProblemData d;
  d.D = 1.0;
  d.beta = 0.5;
  d.b = 0.5;
  d.C1 = 0.3;
  d.u0 = FunctionSpec::polynomial({1.0, -1.0});
  d.f = FunctionSpec::polynomial({1.0, 0.2});
  return d;
}

VolterraContext context(std::size_t n, ExecPolicy exec) {
  const auto d = data();
  const auto der = derive_constants(d).derived;
  return make_context(d, der, build_initial_profiles(d, der, 2000), SolverGrid{0.05, n}, ChiForm::corrected, exec);
}

void chi(benchmark::State& st, ExecPolicy exec) {
  const auto ctx = context(static_cast<std::size_t>(st.range(0)), exec);
  const auto tr = initial_trace(ctx);
  const auto r = picard_solve(tr, ctx, 1e-10, 100);
  for (auto _ : st) benchmark::DoNotOptimize(chi_map(r.phi, tr, r.curves, ctx, exec));
}

void field(benchmark::State& st, ExecPolicy exec) {
  auto ctx = context(static_cast<std::size_t>(st.range(0)), ExecPolicy::parallel);
  const auto b = solve_outer(ctx, OuterOptions{});
  ctx.exec = exec;
  for (auto _ : st) benchmark::DoNotOptimize(sample_field(b, ctx, static_cast<std::size_t>(st.range(0))));
}

} // namespace

BENCHMARK_CAPTURE(chi, serial, ExecPolicy::serial)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(chi, parallel, ExecPolicy::parallel)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(field, serial, ExecPolicy::serial)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(field, parallel, ExecPolicy::parallel)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
