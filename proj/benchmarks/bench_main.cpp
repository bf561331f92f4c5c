#include <benchmark/benchmark.h>

#include "nullwave/initial.hpp"
#include "nullwave/nullform.hpp"
#include "nullwave/oracle.hpp"
#include "nullwave/solver.hpp"

using namespace nullwave;

namespace {

void BM_StepLinear(benchmark::State& state) {
  const RadialGrid grid = RadialGrid::make(0.875, 20.0, 1.0 / state.range(0));
  const NullFormSpec spec = NullFormSpec::zero();
  const InitialData data =
      make_bump_data(grid, 0.875, {3.0, 1.0, 1.0, 0.0, 0.01});
  const auto seq = build_psi2(data, spec, grid);
  FieldState st;
  st.u_curr = seq.psis[0];
  st.u_prev = seq.psis[0];
  st.dt = 0.5 * grid.dr;
  for (auto _ : state) {
    step(st, spec, grid);
    benchmark::DoNotOptimize(st.u_curr.data());
  }
  state.SetItemsProcessed(state.iterations() * grid.n);
}
BENCHMARK(BM_StepLinear)->Arg(100)->Arg(200);

void BM_StepChaplygin(benchmark::State& state) {
  const RadialGrid grid = RadialGrid::make(0.875, 20.0, 1.0 / state.range(0));
  const NullFormSpec spec = chaplygin_spec();
  const InitialData data =
      make_bump_data(grid, 0.875, {3.0, 1.0, 1.0, 0.0, 0.01});
  const auto seq = build_psi2(data, spec, grid);
  FieldState st;
  st.u_curr = seq.psis[0];
  st.u_prev = seq.psis[0];
  st.dt = 0.5 * grid.dr;
  for (auto _ : state) {
    step(st, spec, grid);
    benchmark::DoNotOptimize(st.u_curr.data());
  }
  state.SetItemsProcessed(state.iterations() * grid.n);
}
BENCHMARK(BM_StepChaplygin)->Arg(100)->Arg(200);

void BM_OraclePoint(benchmark::State& state) {
  SphericalOracleProblem prob;
  const Bump br{3.0, 1.0, 1.0};
  const Bump bt{1.0, 1.0, 1.0};
  prob.f1 = [=](double t, double r) { return bt.value(t) * br.value(r); };
  prob.f1_r_lo = 2.0;
  prob.f1_r_hi = 4.0;
  prob.f1_t_hi = 2.0;
  prob.quad_step = 1.0 / state.range(0);
  const SphericalOracle oracle(prob);
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle(5.0, 2.0));
  }
}
BENCHMARK(BM_OraclePoint)->Arg(50)->Arg(100);

void BM_CheckNull(benchmark::State& state) {
  const NullFormSpec spec = chaplygin_spec();
  for (auto _ : state) {
    benchmark::DoNotOptimize(check_null(spec, 1e-12, 256));
  }
}
BENCHMARK(BM_CheckNull);

}  // namespace

BENCHMARK_MAIN();
