// Command-line front end for the decomposition and the experiment grids.
//
//   pivchol decompose     --synth 'uniform(200,2)' --strategy pcov --rank 20 --out factor.bin
//   pivchol precond-bench --synth 'clusters(5,1000,2,0.15)' --lengthscale 0.3 --out out/
//   pivchol gp-bench      --data data.csv --theta 1 --lengthscale 0.5 --noise 0.01
//   pivchol trace-bounds  --synth 'clusters(3,500,2,0.2)'
//   pivchol synth         --synth 'gp-sample(500,2,1,0.5,0.01)' --out data.csv
//
// Settings may also come from a key = value file given with --config; flags win.

#include "pivchol/bench/config.hpp"
#include "pivchol/bench/dataset_io.hpp"
#include "pivchol/bench/experiments.hpp"
#include "pivchol/errors.hpp"
#include "pivchol/preconditioner.hpp"
#include "pivchol/serialization.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace {

using namespace pivchol;
using namespace pivchol::bench;

constexpr int kConfigError = 2;
constexpr int kDataError = 3;
constexpr int kNumericalError = 4;

struct Settings {
  std::string config_file;
  std::map<std::string, std::string> flags;
};

void add_value_flag(CLI::App* app, Settings& s, const std::string& key, const std::string& help) {
  app->add_option_function<std::string>(
      "--" + key, [&s, key](const std::string& v) { s.flags[key] = v; }, help);
}

void add_common_flags(CLI::App* app, Settings& s) {
  app->add_option("--config", s.config_file, "key = value settings file");
  add_value_flag(app, s, "data", "CSV file, last column is the target");
  add_value_flag(app, s, "target-col", "target column index (negative counts from the end)");
  add_value_flag(app, s, "synth", "synthetic generator, e.g. clusters(5,1000,2,0.15)");
  add_value_flag(app, s, "data-seed", "seed for generation and ingestion shuffle");
  add_value_flag(app, s, "theta", "kernel signal variance");
  app->add_option_function<std::vector<std::string>>(
      "--lengthscale",
      [&s](const std::vector<std::string>& v) {
        std::string joined;
        for (const auto& item : v) joined += (joined.empty() ? "" : ",") + item;
        s.flags["lengthscale"] = joined;
      },
      "lengthscale, repeated per input dimension or given once");
  add_value_flag(app, s, "noise", "noise variance");
  add_value_flag(app, s, "cap", "row cap after shuffling (default 7000)");
  add_value_flag(app, s, "threads", "worker threads");
  add_value_flag(app, s, "out", "output directory or file");
}

void add_grid_flags(CLI::App* app, Settings& s) {
  add_value_flag(app, s, "strategies", "comma-separated: var,pcov,wpcov,weighted,me,mi,aopt,random");
  add_value_flag(app, s, "ranks", "comma-separated ranks (default: experiment schedule)");
  add_value_flag(app, s, "seeds", "comma-separated seeds or a range a..b");
  add_value_flag(app, s, "mi-eps", "MI neighbourhood threshold (default 0.5)");
}

ExperimentConfig resolve(const Settings& s) {
  ExperimentConfig config;
  if (!s.config_file.empty()) {
    for (const auto& [k, v] : parse_config_file(s.config_file)) apply_setting(config, k, v);
  }
  for (const auto& [k, v] : s.flags) apply_setting(config, k, v);
  return config;
}

void report_paths(const std::vector<std::filesystem::path>& paths) {
  for (const auto& p : paths) std::cout << "wrote " << p.string() << '\n';
}

int run_decompose(const ExperimentConfig& config, const std::string& strategy_name, long long rank,
                  bool with_preconditioner) {
  const Dataset data = load_dataset(config);
  const KernelConfig kernel = config.kernel_config(data.dim());
  const GramOperator op(std::make_shared<const Dataset>(data), kernel, GramMode::Noisy,
                        GramOptions{data.size() <= 4096, 4096, config.threads});
  Strategy strategy = Strategy::of(parse_strategy_kind(strategy_name));
  strategy.mi_threshold = config.mi_eps;
  strategy.seed = strategy_seed(config.data_seed);

  DecomposeOptions options;
  if (rank > 0) options.rank = static_cast<Index>(rank);
  const Eigen::VectorXd y = data.y.array() - kernel.prior_mean;
  auto pc = std::make_shared<const PartialCholesky>(decompose(op, y, strategy, options));

  std::cout << "N=" << pc->size() << " rank=" << pc->rank()
            << " residual_trace=" << format_number(pc->residual_trace()) << '\n';
  std::filesystem::path out = config.out_dir;
  if (out == "out") out = "factor.bin";
  if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
  std::ofstream file(out, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + out.string());
  if (with_preconditioner) {
    write_preconditioner(file, LowRankTriangular::build(pc));
  } else {
    write_partial_cholesky(file, *pc);
  }
  std::cout << "wrote " << out.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pivoted Cholesky decompositions, preconditioners and sparse-GP metrics"};
  app.require_subcommand(1);

  Settings settings;

  auto* dec = app.add_subcommand("decompose", "factorize G and write the binary container");
  add_common_flags(dec, settings);
  add_value_flag(dec, settings, "mi-eps", "MI neighbourhood threshold (default 0.5)");
  std::string strategy_name = "var";
  long long rank = 0;
  bool with_preconditioner = false;
  dec->add_option("--strategy", strategy_name, "pivot selection strategy");
  dec->add_option("--rank", rank, "target rank (default N)");
  dec->add_flag("--preconditioner", with_preconditioner, "append the preconditioner diagonal");

  auto* pre = app.add_subcommand("precond-bench", "preconditioned CG iteration grid");
  add_common_flags(pre, settings);
  add_grid_flags(pre, settings);
  add_value_flag(pre, settings, "tol", "relative residual tolerance (default 1e-4)");
  add_value_flag(pre, settings, "max-iter", "CG iteration cap (default 10 N)");

  auto* gp = app.add_subcommand("gp-bench", "sparse-GP regression metrics grid");
  add_common_flags(gp, settings);
  add_grid_flags(gp, settings);
  gp->add_flag_function(
      "--paper-literal-coefficients",
      [&settings](std::int64_t) { settings.flags["paper-literal-coefficients"] = "true"; },
      "use the N/2 and 1/s2 coefficients in the free energy");

  auto* tb = app.add_subcommand("trace-bounds", "per-row trace-reduction bounds");
  add_common_flags(tb, settings);

  auto* syn = app.add_subcommand("synth", "write a synthetic dataset as CSV");
  add_common_flags(syn, settings);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    const ExperimentConfig config = resolve(settings);
    if (dec->parsed()) return run_decompose(config, strategy_name, rank, with_preconditioner);

    const Dataset data = load_dataset(config);
    if (pre->parsed()) {
      report_paths(write_outputs(config.out_dir, run_precond_experiment(config, data)));
    } else if (gp->parsed()) {
      report_paths(write_outputs(config.out_dir, run_regression_experiment(config, data)));
    } else if (tb->parsed()) {
      const auto result = run_trace_bounds(config, data);
      report_paths(write_outputs(config.out_dir, result));
      std::cout << "violations: " << result.violations << '\n';
    } else if (syn->parsed()) {
      std::filesystem::path out = config.out_dir;
      if (out == "out") out = "synth.csv";
      if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
      write_dataset_csv(out, data);
      std::cout << "wrote " << out.string() << " (" << data.size() << " rows)\n";
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ContractViolation& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
