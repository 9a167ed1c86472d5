#pragma once

#include "pivchol/bench/config.hpp"
#include "pivchol/bench/csv.hpp"
#include "pivchol/kernel.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace pivchol::bench {

// Loads the configured data source: the synthetic generator seeded with
// data_seed, or the CSV file ingested with data_seed and cap.
Dataset load_dataset(const ExperimentConfig& config);

// The dataset with its rows shuffled by a stream seeded with `seed`.
Dataset shuffled(const Dataset& data, std::uint64_t seed);

// Seed handed to the Random strategy for a given repetition.
std::uint64_t strategy_seed(std::uint64_t seed);

// Strategies actually run on a dataset of size n (MI dropped above mi_max_n).
std::vector<StrategyKind> effective_strategies(const ExperimentConfig& config, Index n);

struct PrecondResult {
  // dataset, strategy, rank, seed, iterations, wall_ms, converged, error.
  // One "none" row with rank 0 per seed is the unpreconditioned baseline.
  CsvTable table{{"dataset", "strategy", "rank", "seed", "iterations", "wall_ms", "converged",
                  "error"}};
  std::string svg;
};

// strategy x rank x seed grid of preconditioned CG solves of G a = y.
// A failing cell is recorded in the error column; the grid keeps going.
PrecondResult run_precond_experiment(const ExperimentConfig& config, const Dataset& data);

struct RegressionResult {
  CsvTable table{{"dataset", "strategy", "seed", "rank", "sse", "trace", "nlml", "sse_norm",
                  "trace_norm", "nlml_norm", "error"}};
  // metric, divisor, source.
  CsvTable normalization{{"metric", "divisor", "source"}};
  std::string sse_svg;
  std::string trace_svg;
  std::string nlml_svg;
};

// One decomposition of the latent kernel matrix per strategy x seed, with
// SSE, trace and NLML recorded after every rank of the schedule. Metrics are
// also reported divided by the magnitude of their rank-1 Random median.
RegressionResult run_regression_experiment(const ExperimentConfig& config, const Dataset& data);

struct TraceBoundsResult {
  CsvTable table{{"index", "mean", "variance", "second_moment", "tau", "lower", "upper",
                  "assumptions_hold", "bounds_hold"}};
  CsvTable summary{{"dataset", "rows", "assumption_failures", "violations"}};
  Index violations = 0;
};

// Row statistics and trace-reduction bounds of K; violations are counted,
// not thrown.
TraceBoundsResult run_trace_bounds(const ExperimentConfig& config, const Dataset& data);

// Writes the result files into `dir` (created if needed) and returns their paths.
std::vector<std::filesystem::path> write_outputs(const std::filesystem::path& dir,
                                                 const PrecondResult& result);
std::vector<std::filesystem::path> write_outputs(const std::filesystem::path& dir,
                                                 const RegressionResult& result);
std::vector<std::filesystem::path> write_outputs(const std::filesystem::path& dir,
                                                 const TraceBoundsResult& result);

}  // namespace pivchol::bench
