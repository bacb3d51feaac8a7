#include <benchmark/benchmark.h>

#include <random>

#include "bsforecast/assembly.hpp"
#include "bsforecast/synth.hpp"

namespace {

bsf::DataBlock fixture_block() {
  bsf::SynthOptions gen;
  gen.model = bsf::SynthModel::gbm_drift;
  gen.n = 1;
  gen.seed = 42;
  return bsf::generate_blocks(gen)[0];
}

void BM_BuildOperator(benchmark::State& state) {
  const bsf::DataBlock block = fixture_block();
  const int M = static_cast<int>(state.range(0));
  const bsf::GridSpec spec = bsf::build_grid_spec(block, M);
  const bsf::BoundaryData bd =
      bsf::extrapolate_boundary(block, bsf::BoundaryMode::quadratic);
  for (auto _ : state) {
    bsf::SparseMatrix L = bsf::build_L(spec, bd);
    benchmark::DoNotOptimize(L);
  }
  state.SetComplexityN(M);
}
BENCHMARK(BM_BuildOperator)->Arg(21)->Arg(41)->Arg(81)->Complexity();

void BM_ReduceAndNormalize(benchmark::State& state) {
  const bsf::DataBlock block = fixture_block();
  const int M = static_cast<int>(state.range(0));
  const bsf::GridSpec spec = bsf::build_grid_spec(block, M);
  const bsf::BoundaryData bd =
      bsf::extrapolate_boundary(block, bsf::BoundaryMode::quadratic);
  const bsf::SparseMatrix L = bsf::build_L(spec, bd);
  for (auto _ : state) {
    bsf::AssembledSystem sys =
        bsf::normalize_rows(bsf::reduce_system(L, spec, bd));
    benchmark::DoNotOptimize(sys);
  }
}
BENCHMARK(BM_ReduceAndNormalize)->Arg(21)->Arg(41);

void BM_OperatorMatvec(benchmark::State& state) {
  const bsf::DataBlock block = fixture_block();
  const int M = static_cast<int>(state.range(0));
  const bsf::GridSpec spec = bsf::build_grid_spec(block, M);
  const bsf::BoundaryData bd =
      bsf::extrapolate_boundary(block, bsf::BoundaryMode::quadratic);
  const bsf::SparseMatrix L = bsf::build_L(spec, bd);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> x(spec.size());
  for (double& v : x) v = dist(rng);
  for (auto _ : state) {
    auto y = L.multiply(x);
    benchmark::DoNotOptimize(y);
  }
}
BENCHMARK(BM_OperatorMatvec)->Arg(21)->Arg(41)->Arg(81);

}  // namespace

BENCHMARK_MAIN();
