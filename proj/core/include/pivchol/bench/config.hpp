#pragma once

#include "pivchol/kernel.hpp"
#include "pivchol/pivoted_cholesky.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pivchol::bench {

// Invalid configuration file or flag value.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  // Exactly one data source.
  std::optional<std::filesystem::path> data_path;
  std::optional<Index> target_col;
  std::optional<std::string> synth_spec;
  // Seed for synthetic generation and for the ingestion shuffle.
  std::uint64_t data_seed = 0;

  double theta = 1.0;
  // One entry per input dimension, or a single entry broadcast to all.
  std::vector<double> lengthscales{1.0};
  double noise = 1e-2;

  std::vector<StrategyKind> strategies{StrategyKind::Var, StrategyKind::PCov,
                                       StrategyKind::WPCov, StrategyKind::ME,
                                       StrategyKind::MI, StrategyKind::Random};
  // Empty selects the default schedule of each experiment.
  std::vector<Index> ranks;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};

  Index cap = 7000;
  double tol = 1e-4;
  Index max_iterations = 0;
  double mi_eps = 0.5;
  bool paper_literal_coefficients = false;
  // MI is dropped from grids above this size.
  Index mi_max_n = 512;

  std::filesystem::path out_dir = "out";
  unsigned threads = 1;

  // Name used in CSV rows and plot titles.
  std::string dataset_label() const;
  KernelConfig kernel_config(Index dim) const;
};

// key = value lines; '#' starts a comment. Keys are the long flag names
// without the leading dashes (data, target-col, synth, data-seed, theta,
// lengthscale, noise, strategies, ranks, seeds, cap, tol, max-iter, mi-eps,
// paper-literal-coefficients, out, threads). Lists are comma-separated;
// seeds also accept an inclusive range "a..b".
std::map<std::string, std::string> parse_config_text(std::string_view text);
std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path);

// Applies one key/value pair; throws ConfigError on unknown keys or bad values.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

std::vector<double> parse_double_list(std::string_view text);
std::vector<Index> parse_index_list(std::string_view text);
std::vector<std::uint64_t> parse_seed_list(std::string_view text);
std::vector<StrategyKind> parse_strategy_list(std::string_view text);

// {2, 4, ..., 2^R} with R = ceil(log2(sqrt(N))) + 1, capped at N.
std::vector<Index> precond_rank_schedule(Index n);
// 1, 2, ..., ceil(sqrt(N)).
std::vector<Index> regression_rank_schedule(Index n);

}  // namespace pivchol::bench
