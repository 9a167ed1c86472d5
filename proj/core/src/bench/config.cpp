#include "pivchol/bench/config.hpp"

#include "pivchol/bench/csv.hpp"
#include "pivchol/errors.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pivchol::bench {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  text = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError("invalid " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

bool parse_bool(std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError("invalid boolean '" + std::string(text) + "'");
}

}  // namespace

std::string ExperimentConfig::dataset_label() const {
  if (synth_spec) {
    std::string label;
    for (char c : *synth_spec) {
      if (c == ',' ) {
        label += ';';
      } else if (c != ' ') {
        label += c;
      }
    }
    return label;
  }
  if (data_path) return data_path->stem().string();
  return "unnamed";
}

KernelConfig ExperimentConfig::kernel_config(Index dim) const {
  KernelConfig c = KernelConfig::isotropic(dim, theta, lengthscales.empty() ? 1.0 : lengthscales[0],
                                           noise);
  if (lengthscales.size() > 1) {
    if (static_cast<Index>(lengthscales.size()) != dim) {
      throw ConfigError("got " + std::to_string(lengthscales.size()) +
                        " lengthscales for " + std::to_string(dim) + " input dimensions");
    }
    c.lengthscales = Eigen::Map<const Eigen::VectorXd>(lengthscales.data(), dim);
  }
  try {
    c.validate(dim);
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
  return c;
}

std::map<std::string, std::string> parse_config_text(std::string_view text) {
  std::map<std::string, std::string> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    out[std::string(key)] = std::string(trim(line.substr(eq + 1)));
    if (end == text.size()) break;
  }
  return out;
}

std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::vector<double> parse_double_list(std::string_view text) {
  std::vector<double> out;
  for (auto f : split_fields(text)) out.push_back(parse_number<double>(f, "number"));
  return out;
}

std::vector<Index> parse_index_list(std::string_view text) {
  std::vector<Index> out;
  for (auto f : split_fields(text)) {
    const auto v = parse_number<long long>(f, "integer");
    if (v < 0) throw ConfigError("negative value in list");
    out.push_back(static_cast<Index>(v));
  }
  return out;
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  std::vector<std::uint64_t> out;
  for (auto f : split_fields(text)) {
    f = trim(f);
    if (const auto dots = f.find(".."); dots != std::string_view::npos) {
      const auto lo = parse_number<std::uint64_t>(f.substr(0, dots), "seed");
      const auto hi = parse_number<std::uint64_t>(f.substr(dots + 2), "seed");
      if (hi < lo) throw ConfigError("empty seed range '" + std::string(f) + "'");
      for (auto s = lo; s <= hi; ++s) out.push_back(s);
    } else {
      out.push_back(parse_number<std::uint64_t>(f, "seed"));
    }
  }
  return out;
}

std::vector<StrategyKind> parse_strategy_list(std::string_view text) {
  std::vector<StrategyKind> out;
  for (auto f : split_fields(text)) {
    try {
      out.push_back(parse_strategy_kind(trim(f)));
    } catch (const ContractViolation& e) {
      throw ConfigError(e.what());
    }
  }
  return out;
}

void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value) {
  if (key == "data") {
    config.data_path = value;
  } else if (key == "target-col") {
    config.target_col = parse_number<long long>(value, "target column");
  } else if (key == "synth") {
    config.synth_spec = value;
  } else if (key == "data-seed") {
    config.data_seed = parse_number<std::uint64_t>(value, "data seed");
  } else if (key == "theta") {
    config.theta = parse_number<double>(value, "theta");
  } else if (key == "lengthscale") {
    config.lengthscales = parse_double_list(value);
  } else if (key == "noise") {
    config.noise = parse_number<double>(value, "noise");
  } else if (key == "strategies") {
    config.strategies = parse_strategy_list(value);
  } else if (key == "ranks") {
    config.ranks = parse_index_list(value);
  } else if (key == "seeds") {
    config.seeds = parse_seed_list(value);
  } else if (key == "cap") {
    config.cap = parse_number<long long>(value, "cap");
  } else if (key == "tol") {
    config.tol = parse_number<double>(value, "tolerance");
  } else if (key == "max-iter") {
    config.max_iterations = parse_number<long long>(value, "iteration cap");
  } else if (key == "mi-eps") {
    config.mi_eps = parse_number<double>(value, "MI threshold");
  } else if (key == "paper-literal-coefficients") {
    config.paper_literal_coefficients = parse_bool(value);
  } else if (key == "out") {
    config.out_dir = value;
  } else if (key == "threads") {
    config.threads = static_cast<unsigned>(parse_number<unsigned long>(value, "thread count"));
  } else {
    throw ConfigError("unknown setting '" + key + "'");
  }

  if (!(config.theta > 0.0)) throw ConfigError("theta must be positive");
  if (!(config.noise >= 0.0)) throw ConfigError("noise must be non-negative");
  if (!(config.tol > 0.0)) throw ConfigError("tol must be positive");
  if (!(config.mi_eps >= 0.0 && config.mi_eps <= 1.0)) throw ConfigError("mi-eps must be in [0, 1]");
  if (config.cap < 2) throw ConfigError("cap must be at least 2");
  for (double l : config.lengthscales) {
    if (!(l > 0.0)) throw ConfigError("lengthscales must be positive");
  }
}

std::vector<Index> precond_rank_schedule(Index n) {
  const auto r = static_cast<int>(std::ceil(std::log2(std::sqrt(static_cast<double>(n))))) + 1;
  std::vector<Index> ranks;
  for (int k = 1; k <= r; ++k) {
    const Index rank = Index{1} << k;
    if (rank > n) break;
    ranks.push_back(rank);
  }
  return ranks;
}

std::vector<Index> regression_rank_schedule(Index n) {
  const auto top = static_cast<Index>(std::ceil(std::sqrt(static_cast<double>(n))));
  std::vector<Index> ranks;
  for (Index m = 1; m <= std::min(top, n); ++m) ranks.push_back(m);
  return ranks;
}

}  // namespace pivchol::bench
