#include <benchmark/benchmark.h>

#include <vector>

#include "gridruin/analytic.hpp"
#include "gridruin/constants.hpp"
#include "gridruin/estimators.hpp"
#include "gridruin/model.hpp"
#include "gridruin/rng.hpp"

using namespace gridruin;

static void BM_Normals(benchmark::State& state) {
  RandomStream rng = make_rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(rng.next_normal());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Normals);

static void BM_SimulatePath(benchmark::State& state) {
  const Grid g(0.1);
  std::uint64_t id = 0;
  for (auto _ : state) {
    RandomStream rng = make_rng(1, id++);
    benchmark::DoNotOptimize(simulate_path(g, -1.0, state.range(0), rng));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulatePath)->Arg(100)->Arg(1000);

static void BM_DyFunctional(benchmark::State& state) {
  std::vector<double> w;
  RandomStream rng = make_rng(2, 0);
  constants::sample_two_sided(0.2, state.range(0), rng, w);
  for (auto _ : state) benchmark::DoNotOptimize(constants::dy_ratio(w));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.size()));
}
BENCHMARK(BM_DyFunctional)->Arg(100)->Arg(1000);

static void BM_TiltedEstimate(benchmark::State& state) {
  EstimateRequest r;
  r.params = {1.0, 10.0};
  r.n = 10000;
  r.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(estimate(r));
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_TiltedEstimate)->Unit(benchmark::kMillisecond);

static void BM_DpOracle(benchmark::State& state) {
  const ModelParams p{1.0, 2.0};
  const Grid g(0.1);
  for (auto _ : state) benchmark::DoNotOptimize(analytic::dp_classical_ruin(p, g, state.range(0)));
}
BENCHMARK(BM_DpOracle)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
