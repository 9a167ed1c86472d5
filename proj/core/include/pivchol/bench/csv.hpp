#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace pivchol::bench {

// Shortest round-trip decimal form, independent of the global locale.
std::string format_number(double value);
std::string format_number(long long value);

std::vector<std::string_view> split_fields(std::string_view line, char sep = ',');

// Comma-separated table with a fixed header. Cells must not contain commas,
// quotes or newlines.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> row);
  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  std::string to_string() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace pivchol::bench
