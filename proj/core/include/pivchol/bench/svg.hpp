#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace pivchol::bench {

// One line with a shaded band, e.g. median and 5-95% quantiles over seeds.
struct BandSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> center;
  std::vector<double> lower;
  std::vector<double> upper;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log2_x = false;
  // Optional dashed reference line (e.g. the unpreconditioned median).
  std::optional<double> reference;
  std::string reference_label;
};

std::string render_band_plot(const PlotSpec& spec, const std::vector<BandSeries>& series);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Linear-interpolation quantile of an unsorted sample, q in [0, 1].
double quantile(std::vector<double> values, double q);

}  // namespace pivchol::bench
