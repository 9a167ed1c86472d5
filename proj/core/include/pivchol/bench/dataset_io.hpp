#pragma once

#include "pivchol/kernel.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pivchol::bench {

// Unusable input data: missing file, too few rows, constant columns.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IngestOptions {
  std::uint64_t seed = 0;
  Index cap = 7000;
  // Column holding the target; defaults to the last one. Negative values
  // count from the end.
  std::optional<Index> target_col;
};

struct IngestReport {
  Dataset data;
  Index rows_read = 0;
  Index rows_dropped = 0;
  bool had_header = false;
};

// Reads a comma-separated numeric file. Rows with empty or non-numeric cells
// are dropped, the rest are shuffled with `seed`, truncated to `cap` and
// standardized (zero mean, unit sample standard deviation per column and for
// the target, using post-truncation statistics). A first row that does not
// parse is treated as a header.
IngestReport ingest(const std::filesystem::path& path, const IngestOptions& options = {});
IngestReport ingest_text(std::string_view text, const IngestOptions& options = {});

// Standardizes every column of X and y in place; throws DataError naming the
// first constant column.
void standardize(Dataset& data);

// Synthetic generators, deterministic per seed:
//   clusters(k, N, D, spread)             Gaussian blobs around k centres in [-1, 1]^D
//   uniform(N, D)                         uniform on [-1, 1]^D
//   gp-sample(N, D, theta, l, noise)      inputs uniform, targets drawn from the GP
// clusters and uniform use y = sum_d sin(2 x_d) + 0.1 * eps.
Dataset synth(std::string_view spec, std::uint64_t seed);

// Writes X columns then y as CSV with a header x0,...,x{D-1},y.
void write_dataset_csv(const std::filesystem::path& path, const Dataset& data);

}  // namespace pivchol::bench
