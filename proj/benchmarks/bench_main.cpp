#include <benchmark/benchmark.h>

#include "occopt/bounds.hpp"
#include "occopt/dynamics.hpp"
#include "occopt/el2.hpp"
#include "occopt/el4.hpp"
#include "occopt/elliptic.hpp"

using namespace occopt;

namespace {

void BM_IntegrateLiouville(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto pulse = PulseGrid::sample(TimeGrid(1.0, n), [](double t) { return 5.0 * std::sin(3.0 * t) + 1.0; });
  for (auto _ : state) benchmark::DoNotOptimize(integrate_liouville({1, 5, 2.5}, pulse));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_IntegrateLiouville)->Arg(400)->Arg(4000);

void BM_Jacobi(benchmark::State& state) {
  const EllipticParameter m(0.7);
  double u = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(jacobi_am_dn_sn_cn(u, m));
    u += 1e-3;
  }
}
BENCHMARK(BM_Jacobi);

void BM_ClosedForm(benchmark::State& state) {
  const SystemParams p{1, 5, 2.5};
  double theta = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rho22_closed_form(p, theta, 0.5));
    theta += 1e-3;
  }
}
BENCHMARK(BM_ClosedForm);

void BM_SolveEL2(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(solve_el2({0.7, 1.0, 4000}));
}
BENCHMARK(BM_SolveEL2)->Unit(benchmark::kMillisecond);

void BM_SolveEL4(benchmark::State& state) {
  EL4Config c;
  c.lambda = -0.1;
  c.lambda1 = -1e-3;
  c.n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_el4(c, SystemParams{1, 5, 2.5}));
}
BENCHMARK(BM_SolveEL4)->Arg(400)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_BoundCheck(benchmark::State& state) {
  EnsembleConfig e;
  const auto pulses = random_pulse_ensemble(e, TimeGrid(1.0, 400));
  for (auto _ : state) benchmark::DoNotOptimize(bound_check({1, 1, 0.5}, pulses));
}
BENCHMARK(BM_BoundCheck)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
