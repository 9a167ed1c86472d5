#include "fixtures.hpp"

#include "pivchol/pivoted_cholesky.hpp"

#include <benchmark/benchmark.h>

using namespace pivchol;

namespace {

void decompose_rank(benchmark::State& state, StrategyKind kind) {
  const auto op = fixtures::gram(state.range(0));
  const Eigen::VectorXd y = fixtures::targets(op);
  DecomposeOptions options;
  options.rank = state.range(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(decompose(op, y, Strategy::of(kind), options));
  }
  state.SetComplexityN(state.range(0) * state.range(1));
}

}  // namespace

BENCHMARK_CAPTURE(decompose_rank, var, StrategyKind::Var)->Args({1000, 32})->Args({4000, 64});
BENCHMARK_CAPTURE(decompose_rank, pcov, StrategyKind::PCov)->Args({1000, 32})->Args({4000, 64});
BENCHMARK_CAPTURE(decompose_rank, wpcov, StrategyKind::WPCov)->Args({1000, 32})->Args({4000, 64});
BENCHMARK_CAPTURE(decompose_rank, me, StrategyKind::ME)->Args({1000, 32})->Args({4000, 64});
BENCHMARK_CAPTURE(decompose_rank, random, StrategyKind::Random)->Args({1000, 32});
// Dense Schur complement per step; only feasible on small problems.
BENCHMARK_CAPTURE(decompose_rank, mi, StrategyKind::MI)->Args({200, 8});
BENCHMARK_CAPTURE(decompose_rank, aopt, StrategyKind::AOpt)->Args({200, 8});
