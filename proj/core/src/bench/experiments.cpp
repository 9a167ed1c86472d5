#include "pivchol/bench/experiments.hpp"

#include "pivchol/bench/dataset_io.hpp"
#include "pivchol/bench/svg.hpp"
#include "pivchol/errors.hpp"
#include "pivchol/metrics.hpp"
#include "pivchol/pcg.hpp"
#include "pivchol/preconditioner.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <thread>

namespace pivchol::bench {

namespace {

constexpr Index kDenseCacheCap = 4096;

// Runs fn(0..count-1) on up to `threads` workers. Each call writes only its
// own output slot, so the result order never depends on scheduling.
void run_pool(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
}

// Exception text made safe for a CSV cell.
std::string cell_text(const std::string& what) {
  std::string out;
  for (char c : what) {
    if (c == ',' || c == ';') {
      out += ';';
    } else if (c == '\n' || c == '\r' || c == '"') {
      out += ' ';
    } else {
      out += c;
    }
  }
  return out;
}

std::string cell_text(const std::exception& e) { return cell_text(std::string(e.what())); }

GramOperator make_operator(const Dataset& data, const KernelConfig& kernel, GramMode mode,
                           unsigned threads) {
  GramOptions options;
  options.dense_cache = data.size() <= kDenseCacheCap;
  options.dense_cache_cap = kDenseCacheCap;
  options.threads = threads;
  return GramOperator(std::make_shared<const Dataset>(data), kernel, mode, options);
}

Strategy make_strategy(StrategyKind kind, const ExperimentConfig& config, std::uint64_t seed) {
  Strategy s = Strategy::of(kind);
  s.mi_threshold = config.mi_eps;
  s.seed = strategy_seed(seed);
  return s;
}

Eigen::VectorXd centered_targets(const Dataset& data, const KernelConfig& kernel) {
  return data.y.array() - kernel.prior_mean;
}

BandSeries band(const std::string& name, const std::vector<Index>& ranks,
                const std::map<Index, std::vector<double>>& samples) {
  BandSeries s;
  s.name = name;
  for (Index r : ranks) {
    const auto it = samples.find(r);
    if (it == samples.end() || it->second.empty()) continue;
    s.x.push_back(static_cast<double>(r));
    s.center.push_back(quantile(it->second, 0.5));
    s.lower.push_back(quantile(it->second, 0.05));
    s.upper.push_back(quantile(it->second, 0.95));
  }
  return s;
}

}  // namespace

Dataset load_dataset(const ExperimentConfig& config) {
  if (config.synth_spec && config.data_path) {
    throw ConfigError("give either a data file or a synthetic spec, not both");
  }
  if (config.synth_spec) {
    try {
      return synth(*config.synth_spec, config.data_seed);
    } catch (const ContractViolation& e) {
      throw ConfigError(e.what());
    }
  }
  if (config.data_path) {
    IngestOptions options;
    options.seed = config.data_seed;
    options.cap = config.cap;
    options.target_col = config.target_col;
    try {
      return ingest(*config.data_path, options).data;
    } catch (const ContractViolation& e) {
      throw DataError(e.what());
    }
  }
  throw ConfigError("no data source: set a data file or a synthetic spec");
}

Dataset shuffled(const Dataset& data, std::uint64_t seed) {
  std::vector<Index> order(static_cast<std::size_t>(data.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  return data.permuted(order);
}

std::uint64_t strategy_seed(std::uint64_t seed) { return seed ^ 0x9E3779B97F4A7C15ULL; }

std::vector<StrategyKind> effective_strategies(const ExperimentConfig& config, Index n) {
  std::vector<StrategyKind> out;
  for (auto kind : config.strategies) {
    if (kind == StrategyKind::MI && n > config.mi_max_n) continue;
    if (std::find(out.begin(), out.end(), kind) == out.end()) out.push_back(kind);
  }
  return out;
}

PrecondResult run_precond_experiment(const ExperimentConfig& config, const Dataset& data) {
  data.validate();
  const Index n = data.size();
  const KernelConfig kernel = config.kernel_config(data.dim());
  const auto strategies = effective_strategies(config, n);
  std::vector<Index> ranks = config.ranks.empty() ? precond_rank_schedule(n) : config.ranks;
  for (Index& r : ranks) r = std::min(r, n);

  struct Cell {
    std::size_t seed_index;
    std::optional<StrategyKind> kind;  // empty: unpreconditioned
    Index rank;
  };
  std::vector<Cell> cells;
  for (std::size_t s = 0; s < config.seeds.size(); ++s) {
    cells.push_back({s, std::nullopt, 0});
    for (auto kind : strategies) {
      for (Index r : ranks) cells.push_back({s, kind, r});
    }
  }

  // Operators are shared read-only by all cells of a seed.
  std::vector<GramOperator> ops;
  std::vector<Eigen::VectorXd> targets;
  for (auto seed : config.seeds) {
    const Dataset d = shuffled(data, seed);
    ops.push_back(make_operator(d, kernel, GramMode::Noisy, 1));
    targets.push_back(centered_targets(d, kernel));
  }

  struct Outcome {
    Index iterations = -1;
    double wall_ms = 0.0;
    bool converged = false;
    std::string error;
  };
  std::vector<Outcome> outcomes(cells.size());

  PcgOptions pcg_options;
  pcg_options.tolerance = config.tol;
  pcg_options.max_iterations = config.max_iterations;

  run_pool(cells.size(), config.threads, [&](std::size_t i) {
    const Cell& cell = cells[i];
    const GramOperator& op = ops[cell.seed_index];
    const Eigen::VectorXd& y = targets[cell.seed_index];
    Outcome& out = outcomes[i];
    const auto start = std::chrono::steady_clock::now();
    try {
      PcgReport report;
      if (!cell.kind) {
        report = pcg_solve(op, y, nullptr, pcg_options);
      } else {
        DecomposeOptions options;
        options.rank = cell.rank;
        const Strategy strategy = make_strategy(*cell.kind, config, config.seeds[cell.seed_index]);
        auto pc = std::make_shared<const PartialCholesky>(decompose(op, y, strategy, options));
        const LowRankTriangular pre = LowRankTriangular::build(pc);
        report = pcg_solve(op, y, &pre, pcg_options);
      }
      out.iterations = report.iterations;
      out.converged = report.converged;
    } catch (const std::exception& e) {
      out.error = cell_text(e);
    }
    out.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  });

  PrecondResult result;
  const std::string label = config.dataset_label();
  std::map<std::string, std::map<Index, std::vector<double>>> samples;
  std::vector<double> baseline;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Cell& cell = cells[i];
    const Outcome& out = outcomes[i];
    const std::string name = cell.kind ? std::string(to_string(*cell.kind)) : "none";
    result.table.add_row({label, name, format_number(static_cast<long long>(cell.rank)),
                          format_number(static_cast<long long>(config.seeds[cell.seed_index])),
                          out.error.empty() ? format_number(static_cast<long long>(out.iterations))
                                            : "",
                          format_number(out.wall_ms), out.converged ? "true" : "false",
                          out.error});
    if (!out.error.empty()) continue;
    if (cell.kind) {
      samples[name][cell.rank].push_back(static_cast<double>(out.iterations));
    } else {
      baseline.push_back(static_cast<double>(out.iterations));
    }
  }

  std::vector<BandSeries> series;
  for (auto kind : strategies) {
    const std::string name(to_string(kind));
    series.push_back(band(name, ranks, samples[name]));
  }
  PlotSpec spec;
  spec.title = label + ": CG iterations";
  spec.x_label = "rank";
  spec.y_label = "iterations";
  spec.log2_x = true;
  if (!baseline.empty()) {
    spec.reference = quantile(baseline, 0.5);
    spec.reference_label = "none";
  }
  result.svg = render_band_plot(spec, series);
  return result;
}

RegressionResult run_regression_experiment(const ExperimentConfig& config, const Dataset& data) {
  data.validate();
  const Index n = data.size();
  const KernelConfig kernel = config.kernel_config(data.dim());
  const auto strategies = effective_strategies(config, n);
  std::vector<Index> ranks = config.ranks.empty() ? regression_rank_schedule(n) : config.ranks;
  for (Index& r : ranks) r = std::clamp<Index>(r, 1, n);
  std::sort(ranks.begin(), ranks.end());
  ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());
  const Index max_rank = ranks.empty() ? 0 : ranks.back();
  const std::set<Index> wanted(ranks.begin(), ranks.end());

  std::vector<GramOperator> ops;
  std::vector<Eigen::VectorXd> targets;
  for (auto seed : config.seeds) {
    const Dataset d = shuffled(data, seed);
    ops.push_back(make_operator(d, kernel, GramMode::Latent, 1));
    targets.push_back(centered_targets(d, kernel));
  }

  struct Snapshot {
    Index rank;
    double sse;
    double trace;
    double nlml;
  };
  struct Outcome {
    std::vector<Snapshot> rows;
    std::string error;
  };
  const std::size_t n_seeds = config.seeds.size();
  std::vector<Outcome> outcomes(strategies.size() * n_seeds);

  run_pool(outcomes.size(), config.threads, [&](std::size_t i) {
    const std::size_t k = i / n_seeds;
    const std::size_t s = i % n_seeds;
    const GramOperator& op = ops[s];
    const Eigen::VectorXd& y = targets[s];
    Outcome& out = outcomes[i];
    try {
      DecomposeOptions options;
      options.rank = max_rank;
      options.on_step = [&](const PartialCholesky& pc, const StrategyState&) {
        if (!wanted.count(pc.rank())) return;
        out.rows.push_back({pc.rank(), sse(pc, op, y), trace_residual(pc),
                            nlml(pc, op, y, config.paper_literal_coefficients).total()});
      };
      const Strategy strategy = make_strategy(strategies[k], config, config.seeds[s]);
      const PartialCholesky pc = decompose(op, y, strategy, options);
      if (pc.rank() < max_rank) {
        out.error = "factor stopped at rank " + std::to_string(pc.rank());
      }
    } catch (const std::exception& e) {
      out.error = cell_text(e);
    }
  });

  RegressionResult result;
  const std::string label = config.dataset_label();

  // Divisors: magnitude of the rank-1 Random median of each metric.
  std::array<double, 3> divisor{1.0, 1.0, 1.0};
  std::string source = "none";
  const auto random_it = std::find(strategies.begin(), strategies.end(), StrategyKind::Random);
  if (random_it != strategies.end()) {
    const auto k = static_cast<std::size_t>(random_it - strategies.begin());
    std::array<std::vector<double>, 3> first;
    for (std::size_t s = 0; s < n_seeds; ++s) {
      for (const auto& row : outcomes[k * n_seeds + s].rows) {
        if (row.rank != 1) continue;
        first[0].push_back(row.sse);
        first[1].push_back(row.trace);
        first[2].push_back(row.nlml);
      }
    }
    if (!first[0].empty()) {
      source = "random rank-1 median";
      for (std::size_t m = 0; m < 3; ++m) {
        const double med = std::abs(quantile(first[m], 0.5));
        divisor[m] = (std::isfinite(med) && med > 0.0) ? med : 1.0;
      }
    }
  }
  const std::array<const char*, 3> metric_names{"sse", "trace", "nlml"};
  for (std::size_t m = 0; m < 3; ++m) {
    result.normalization.add_row({metric_names[m], format_number(divisor[m]), source});
  }

  std::array<std::map<std::string, std::map<Index, std::vector<double>>>, 3> samples;
  for (std::size_t k = 0; k < strategies.size(); ++k) {
    const std::string name(to_string(strategies[k]));
    for (std::size_t s = 0; s < n_seeds; ++s) {
      const Outcome& out = outcomes[k * n_seeds + s];
      const std::string seed = format_number(static_cast<long long>(config.seeds[s]));
      for (const auto& row : out.rows) {
        const std::array<double, 3> values{row.sse, row.trace, row.nlml};
        std::vector<std::string> cells{label, name, seed, format_number(static_cast<long long>(row.rank))};
        for (double v : values) cells.push_back(format_number(v));
        for (std::size_t m = 0; m < 3; ++m) {
          cells.push_back(format_number(values[m] / divisor[m]));
          samples[m][name][row.rank].push_back(values[m] / divisor[m]);
        }
        cells.emplace_back("");
        result.table.add_row(std::move(cells));
      }
      if (!out.error.empty()) {
        result.table.add_row({label, name, seed, "", "", "", "", "", "", "", out.error});
      }
    }
  }

  std::array<std::string*, 3> targets_svg{&result.sse_svg, &result.trace_svg, &result.nlml_svg};
  const std::array<const char*, 3> y_labels{"normalized SSE", "normalized trace",
                                            "normalized NLML"};
  for (std::size_t m = 0; m < 3; ++m) {
    std::vector<BandSeries> series;
    for (auto kind : strategies) {
      const std::string name(to_string(kind));
      series.push_back(band(name, ranks, samples[m][name]));
    }
    PlotSpec spec;
    spec.title = label + ": " + metric_names[m];
    spec.x_label = "rank";
    spec.y_label = y_labels[m];
    *targets_svg[m] = render_band_plot(spec, series);
  }
  return result;
}

TraceBoundsResult run_trace_bounds(const ExperimentConfig& config, const Dataset& data) {
  data.validate();
  const KernelConfig kernel = config.kernel_config(data.dim());
  const GramOperator op = make_operator(data, kernel, GramMode::Latent, config.threads);
  const auto rows = trace_bounds(op, false);

  TraceBoundsResult result;
  Index assumption_failures = 0;
  for (const auto& row : rows) {
    if (!row.assumptions_hold) {
      ++assumption_failures;
    } else if (!row.bounds_hold) {
      ++result.violations;
    }
    result.table.add_row({format_number(static_cast<long long>(row.index)),
                          format_number(row.mean), format_number(row.variance),
                          format_number(row.second_moment), format_number(row.tau),
                          format_number(row.lower), format_number(row.upper),
                          row.assumptions_hold ? "true" : "false",
                          row.bounds_hold ? "true" : "false"});
  }
  result.summary.add_row({config.dataset_label(),
                          format_number(static_cast<long long>(rows.size())),
                          format_number(static_cast<long long>(assumption_failures)),
                          format_number(static_cast<long long>(result.violations))});
  return result;
}

std::vector<std::filesystem::path> write_outputs(const std::filesystem::path& dir,
                                                 const PrecondResult& result) {
  std::filesystem::create_directories(dir);
  const std::vector<std::filesystem::path> paths{dir / "precond.csv", dir / "precond_iterations.svg"};
  result.table.write(paths[0]);
  write_text_file(paths[1], result.svg);
  return paths;
}

std::vector<std::filesystem::path> write_outputs(const std::filesystem::path& dir,
                                                 const RegressionResult& result) {
  std::filesystem::create_directories(dir);
  const std::vector<std::filesystem::path> paths{dir / "regression.csv", dir / "normalization.csv",
                                                 dir / "regression_sse.svg",
                                                 dir / "regression_trace.svg",
                                                 dir / "regression_nlml.svg"};
  result.table.write(paths[0]);
  result.normalization.write(paths[1]);
  write_text_file(paths[2], result.sse_svg);
  write_text_file(paths[3], result.trace_svg);
  write_text_file(paths[4], result.nlml_svg);
  return paths;
}

std::vector<std::filesystem::path> write_outputs(const std::filesystem::path& dir,
                                                 const TraceBoundsResult& result) {
  std::filesystem::create_directories(dir);
  const std::vector<std::filesystem::path> paths{dir / "trace_bounds.csv",
                                                 dir / "trace_bounds_summary.csv"};
  result.table.write(paths[0]);
  result.summary.write(paths[1]);
  return paths;
}

}  // namespace pivchol::bench
