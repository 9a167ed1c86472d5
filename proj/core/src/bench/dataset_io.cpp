#include "pivchol/bench/dataset_io.hpp"

#include "pivchol/bench/csv.hpp"
#include "pivchol/errors.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

namespace pivchol::bench {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::optional<double> parse_cell(std::string_view cell) {
  cell = trim(cell);
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

// Parses "name(a, b, ...)" into the name and its numeric arguments.
std::pair<std::string, std::vector<double>> parse_call(std::string_view spec) {
  spec = trim(spec);
  const auto open = spec.find('(');
  if (open == std::string_view::npos || spec.back() != ')') {
    throw ContractViolation("synthetic spec '" + std::string(spec) +
                            "' must look like name(arg, ...)");
  }
  std::string name(trim(spec.substr(0, open)));
  std::vector<double> args;
  const auto inner = spec.substr(open + 1, spec.size() - open - 2);
  if (!trim(inner).empty()) {
    for (auto field : split_fields(inner)) {
      const auto v = parse_cell(field);
      if (!v) {
        throw ContractViolation("synthetic spec: bad argument '" + std::string(field) + "'");
      }
      args.push_back(*v);
    }
  }
  return {name, args};
}

Index as_count(double v, const char* what) {
  if (!(v >= 1.0) || v != std::floor(v)) {
    throw ContractViolation(std::string("synthetic spec: ") + what + " must be a positive integer");
  }
  return static_cast<Index>(v);
}

Eigen::VectorXd smooth_targets(const Eigen::MatrixXd& x, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd y(x.rows());
  for (Index i = 0; i < x.rows(); ++i) {
    double v = 0.0;
    for (Index d = 0; d < x.cols(); ++d) v += std::sin(2.0 * x(i, d));
    y[i] = v + 0.1 * normal(rng);
  }
  return y;
}

}  // namespace

void standardize(Dataset& data) {
  const Index n = data.size();
  if (n < 2) throw DataError("standardize: need at least 2 rows");
  auto fix = [n](auto&& column, const std::string& name) {
    const double mean = column.mean();
    column.array() -= mean;
    const double sd = std::sqrt(column.squaredNorm() / static_cast<double>(n - 1));
    if (!(sd > 0.0) || sd < 1e-12 * std::max(1.0, std::abs(mean))) {
      throw DataError("column '" + name + "' has zero variance");
    }
    column /= sd;
  };
  for (Index d = 0; d < data.dim(); ++d) fix(data.X.col(d), "x" + std::to_string(d));
  fix(data.y, "target");
}

IngestReport ingest_text(std::string_view text, const IngestOptions& options) {
  if (options.cap < 2) throw ContractViolation("ingest: cap must be at least 2");
  IngestReport report;
  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  bool first_line = true;

  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(start, end - start));
    start = end + 1;
    if (line.empty()) continue;

    const auto fields = split_fields(line);
    std::vector<double> values;
    values.reserve(fields.size());
    bool ok = true;
    for (auto f : fields) {
      const auto v = parse_cell(f);
      if (!v) {
        ok = false;
        break;
      }
      values.push_back(*v);
    }
    if (first_line) {
      first_line = false;
      width = fields.size();
      if (!ok) {
        report.had_header = true;
        continue;
      }
    }
    ++report.rows_read;
    if (!ok || fields.size() != width) {
      ++report.rows_dropped;
      continue;
    }
    rows.push_back(std::move(values));
  }

  if (report.rows_read == 0) throw DataError("no data rows");
  if (width < 2) throw DataError("need at least one input column and a target column");
  if (rows.size() < 2) {
    throw DataError("only " + std::to_string(rows.size()) + " usable rows (need at least 2)");
  }

  Index target = options.target_col.value_or(static_cast<Index>(width) - 1);
  if (target < 0) target += static_cast<Index>(width);
  if (target < 0 || target >= static_cast<Index>(width)) {
    throw ContractViolation("target column " + std::to_string(*options.target_col) +
                            " out of range for " + std::to_string(width) + " columns");
  }

  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(options.seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto kept = std::min<std::size_t>(order.size(), static_cast<std::size_t>(options.cap));

  Dataset& data = report.data;
  const auto n = static_cast<Index>(kept);
  data.X.resize(n, static_cast<Index>(width) - 1);
  data.y.resize(n);
  for (Index i = 0; i < n; ++i) {
    const auto& row = rows[order[static_cast<std::size_t>(i)]];
    Index col = 0;
    for (Index c = 0; c < static_cast<Index>(width); ++c) {
      if (c == target) {
        data.y[i] = row[static_cast<std::size_t>(c)];
      } else {
        data.X(i, col++) = row[static_cast<std::size_t>(c)];
      }
    }
  }
  standardize(data);
  return report;
}

IngestReport ingest(const std::filesystem::path& path, const IngestOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (text.empty()) throw DataError(path.string() + " is empty");
  return ingest_text(text, options);
}

Dataset synth(std::string_view spec, std::uint64_t seed) {
  const auto [name, args] = parse_call(spec);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Dataset data;

  if (name == "clusters") {
    if (args.size() != 4) throw ContractViolation("clusters(k, N, D, spread) takes 4 arguments");
    const Index k = as_count(args[0], "k");
    const Index n = as_count(args[1], "N");
    const Index d = as_count(args[2], "D");
    const double spread = args[3];
    if (!(spread > 0.0)) throw ContractViolation("clusters: spread must be positive");
    Eigen::MatrixXd centres(k, d);
    for (Index c = 0; c < k; ++c) {
      for (Index j = 0; j < d; ++j) centres(c, j) = unit(rng);
    }
    data.X.resize(n, d);
    for (Index i = 0; i < n; ++i) {
      const Index c = i % k;
      for (Index j = 0; j < d; ++j) data.X(i, j) = centres(c, j) + spread * normal(rng);
    }
    data.y = smooth_targets(data.X, rng);
  } else if (name == "uniform") {
    if (args.size() != 2) throw ContractViolation("uniform(N, D) takes 2 arguments");
    const Index n = as_count(args[0], "N");
    const Index d = as_count(args[1], "D");
    data.X.resize(n, d);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < d; ++j) data.X(i, j) = unit(rng);
    }
    data.y = smooth_targets(data.X, rng);
  } else if (name == "gp-sample") {
    if (args.size() != 5) {
      throw ContractViolation("gp-sample(N, D, theta, lengthscale, noise) takes 5 arguments");
    }
    const Index n = as_count(args[0], "N");
    const Index d = as_count(args[1], "D");
    data.X.resize(n, d);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < d; ++j) data.X(i, j) = unit(rng);
    }
    KernelConfig config = KernelConfig::isotropic(d, args[2], args[3], args[4]);
    data.y = Eigen::VectorXd::Zero(n);
    const GramOperator op(std::make_shared<const Dataset>(data), config, GramMode::Latent);
    Eigen::MatrixXd k = op.dense();
    k.diagonal().array() += 1e-8 * config.signal_variance;
    const Eigen::LLT<Eigen::MatrixXd> llt(k);
    if (llt.info() != Eigen::Success) throw NumericalError("gp-sample: kernel matrix not SPD");
    Eigen::VectorXd z(n);
    for (Index i = 0; i < n; ++i) z[i] = normal(rng);
    data.y = llt.matrixL() * z;
    const double noise_sd = std::sqrt(config.noise_variance);
    for (Index i = 0; i < n; ++i) data.y[i] += noise_sd * normal(rng);
  } else {
    throw ContractViolation("unknown synthetic generator '" + name + "'");
  }
  return data;
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data) {
  std::vector<std::string> header;
  for (Index d = 0; d < data.dim(); ++d) header.push_back("x" + std::to_string(d));
  header.emplace_back("y");
  CsvTable table(std::move(header));
  for (Index i = 0; i < data.size(); ++i) {
    std::vector<std::string> row;
    for (Index d = 0; d < data.dim(); ++d) row.push_back(format_number(data.X(i, d)));
    row.push_back(format_number(data.y[i]));
    table.add_row(std::move(row));
  }
  table.write(path);
}

}  // namespace pivchol::bench
