#include <benchmark/benchmark.h>

#include "bsforecast/pipeline.hpp"
#include "bsforecast/solver.hpp"
#include "bsforecast/synth.hpp"

namespace {

void BM_MinimizeCg(benchmark::State& state) {
  bsf::SynthOptions gen;
  gen.model = bsf::SynthModel::gbm_drift;
  gen.n = 1;
  gen.seed = 42;
  const bsf::DataBlock block = bsf::generate_blocks(gen)[0];
  const int M = static_cast<int>(state.range(0));
  const bsf::GridSpec spec = bsf::build_grid_spec(block, M);
  const bsf::BoundaryData bd =
      bsf::extrapolate_boundary(block, bsf::BoundaryMode::quadratic);
  const bsf::AssembledSystem sys =
      bsf::normalize_rows(bsf::reduce_system(bsf::build_L(spec, bd), spec, bd));
  bsf::SolverConfig cfg;
  for (auto _ : state) {
    auto res = bsf::minimize_cg(sys, cfg);
    benchmark::DoNotOptimize(res);
  }
}
BENCHMARK(BM_MinimizeCg)->Arg(21)->Arg(41);

void BM_ForecastOne(benchmark::State& state) {
  bsf::SynthOptions gen;
  gen.model = bsf::SynthModel::gbm_drift;
  gen.n = 1;
  gen.seed = 7;
  const bsf::DataBlock block = bsf::generate_blocks(gen)[0];
  bsf::SolverConfig cfg;
  const int M = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto fc = bsf::forecast_one(block, cfg, M);
    benchmark::DoNotOptimize(fc);
  }
}
BENCHMARK(BM_ForecastOne)->Arg(21)->Arg(41);

void BM_RunBatch(benchmark::State& state) {
  bsf::SynthOptions gen;
  gen.model = bsf::SynthModel::gbm_drift;
  gen.n = 64;
  gen.seed = 9;
  const auto blocks = bsf::generate_blocks(gen);
  bsf::SolverConfig cfg;
  const int parallelism = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto report = bsf::run_batch(blocks, cfg, 21, parallelism);
    benchmark::DoNotOptimize(report);
  }
  state.SetItemsProcessed(state.iterations() * gen.n);
}
BENCHMARK(BM_RunBatch)->Arg(1)->Arg(4)->Arg(8)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
