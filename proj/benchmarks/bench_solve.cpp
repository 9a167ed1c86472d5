#include "fixtures.hpp"

#include "pivchol/pcg.hpp"
#include "pivchol/preconditioner.hpp"

#include <benchmark/benchmark.h>

using namespace pivchol;

namespace {

void mvp(benchmark::State& state) {
  const auto op = fixtures::gram(state.range(0), state.range(1) != 0);
  const Eigen::VectorXd v = Eigen::VectorXd::Ones(op.size());
  for (auto _ : state) benchmark::DoNotOptimize(op.mvp(v));
}
BENCHMARK(mvp)->Args({1000, 0})->Args({1000, 1})->Args({4000, 1});

void apply_inverse(benchmark::State& state) {
  const auto op = fixtures::gram(state.range(0));
  DecomposeOptions options;
  options.rank = state.range(1);
  const auto pre = LowRankTriangular::build(std::make_shared<const PartialCholesky>(
      decompose(op, fixtures::targets(op), Strategy::of(StrategyKind::PCov), options)));
  const Eigen::VectorXd v = Eigen::VectorXd::Ones(op.size());
  for (auto _ : state) benchmark::DoNotOptimize(pre.apply_inverse(v));
}
BENCHMARK(apply_inverse)->Args({1000, 32})->Args({4000, 64})->Args({16000, 128});

void pcg(benchmark::State& state) {
  const auto op = fixtures::gram(2000, true);
  const Eigen::VectorXd y = fixtures::targets(op);
  std::optional<LowRankTriangular> pre;
  if (state.range(0) > 0) {
    DecomposeOptions options;
    options.rank = state.range(0);
    pre = LowRankTriangular::build(std::make_shared<const PartialCholesky>(
        decompose(op, y, Strategy::of(StrategyKind::PCov), options)));
  }
  for (auto _ : state) {
    const auto report = pcg_solve(op, y, pre ? &*pre : nullptr);
    state.counters["iterations"] = static_cast<double>(report.iterations);
  }
}
BENCHMARK(pcg)->Arg(0)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
